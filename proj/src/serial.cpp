#include "tpl/serial.hpp"

#include <algorithm>
#include <cstring>

namespace tpl::serial {

void put_u16(Bytes& out, std::uint16_t v) {
    out.push_back(static_cast<std::uint8_t>(v >> 8));
    out.push_back(static_cast<std::uint8_t>(v));
}

void put_u32(Bytes& out, std::uint32_t v) {
    for (int shift = 24; shift >= 0; shift -= 8)
        out.push_back(static_cast<std::uint8_t>(v >> shift));
}

void put_u64(Bytes& out, std::uint64_t v) {
    for (int shift = 56; shift >= 0; shift -= 8)
        out.push_back(static_cast<std::uint8_t>(v >> shift));
}

void put_i64(Bytes& out, std::int64_t v) {
    put_u64(out, static_cast<std::uint64_t>(v));
}

static void check_len(ByteView in, std::size_t offset, std::size_t need) {
    if (offset + need > in.size())
        throw ParseError("truncated input while decoding fixed-width integer");
}

std::uint16_t get_u16(ByteView in, std::size_t offset) {
    check_len(in, offset, 2);
    return static_cast<std::uint16_t>((in[offset] << 8) | in[offset + 1]);
}

std::uint32_t get_u32(ByteView in, std::size_t offset) {
    check_len(in, offset, 4);
    std::uint32_t v = 0;
    for (std::size_t i = 0; i < 4; ++i) v = (v << 8) | in[offset + i];
    return v;
}

std::uint64_t get_u64(ByteView in, std::size_t offset) {
    check_len(in, offset, 8);
    std::uint64_t v = 0;
    for (std::size_t i = 0; i < 8; ++i) v = (v << 8) | in[offset + i];
    return v;
}

std::int64_t get_i64(ByteView in, std::size_t offset) {
    return static_cast<std::int64_t>(get_u64(in, offset));
}

TlvWriter::TlvWriter(RecordTag tag) {
    buf_.push_back(static_cast<std::uint8_t>(tag));
    put_u16(buf_, 0);  // field count, patched in finish()
}

void TlvWriter::field_bytes(std::uint8_t id, ByteView data) {
    if (finished_) throw Error("TlvWriter reused after finish");
    if (static_cast<int>(id) <= last_id_)
        throw Error("TLV field ids must be strictly increasing");
    last_id_ = id;
    buf_.push_back(id);
    put_u32(buf_, static_cast<std::uint32_t>(data.size()));
    buf_.insert(buf_.end(), data.begin(), data.end());
    ++count_;
}

void TlvWriter::field_str(std::uint8_t id, const std::string& s) {
    field_bytes(id, ByteView(reinterpret_cast<const std::uint8_t*>(s.data()), s.size()));
}

void TlvWriter::field_i64(std::uint8_t id, std::int64_t v) {
    Bytes tmp;
    put_i64(tmp, v);
    field_bytes(id, tmp);
}

void TlvWriter::field_u64(std::uint8_t id, std::uint64_t v) {
    Bytes tmp;
    put_u64(tmp, v);
    field_bytes(id, tmp);
}

Bytes TlvWriter::finish() {
    if (finished_) throw Error("TlvWriter reused after finish");
    finished_ = true;
    buf_[1] = static_cast<std::uint8_t>(count_ >> 8);
    buf_[2] = static_cast<std::uint8_t>(count_);
    return std::move(buf_);
}

TlvRecord TlvRecord::parse(ByteView in) {
    if (in.size() < 3) throw ParseError("TLV record shorter than header");
    TlvRecord rec;
    rec.tag = in[0];
    std::uint16_t count = get_u16(in, 1);
    std::size_t off = 3;
    int last_id = -1;
    rec.fields.reserve(count);
    for (std::uint16_t i = 0; i < count; ++i) {
        if (off + 5 > in.size()) throw ParseError("truncated TLV field header");
        std::uint8_t id = in[off];
        if (static_cast<int>(id) <= last_id)
            throw ParseError("TLV field ids out of order");
        last_id = id;
        std::uint32_t len = get_u32(in, off + 1);
        off += 5;
        if (off + len > in.size()) throw ParseError("truncated TLV field payload");
        rec.fields.push_back(TlvField{id, Bytes(in.begin() + off, in.begin() + off + len)});
        off += len;
    }
    if (off != in.size()) throw ParseError("trailing bytes after TLV record");
    return rec;
}

const TlvField* TlvRecord::find(std::uint8_t id) const {
    for (const auto& f : fields)
        if (f.id == id) return &f;
    return nullptr;
}

ByteView TlvRecord::require_bytes(std::uint8_t id) const {
    const TlvField* f = find(id);
    if (!f) throw ParseError("missing TLV field id " + std::to_string(id));
    return ByteView(f->data);
}

std::string TlvRecord::require_str(std::uint8_t id) const {
    ByteView b = require_bytes(id);
    return std::string(reinterpret_cast<const char*>(b.data()), b.size());
}

std::int64_t TlvRecord::require_i64(std::uint8_t id) const {
    ByteView b = require_bytes(id);
    if (b.size() != 8) throw ParseError("i64 field has wrong width");
    return get_i64(b, 0);
}

std::uint64_t TlvRecord::require_u64(std::uint8_t id) const {
    ByteView b = require_bytes(id);
    if (b.size() != 8) throw ParseError("u64 field has wrong width");
    return get_u64(b, 0);
}

Bytes encode_str_map(const std::map<std::string, std::string>& m) {
    Bytes out;
    put_u16(out, static_cast<std::uint16_t>(m.size()));
    for (const auto& [k, v] : m) {  // std::map iterates keys in sorted order
        put_u32(out, static_cast<std::uint32_t>(k.size()));
        out.insert(out.end(), k.begin(), k.end());
        put_u32(out, static_cast<std::uint32_t>(v.size()));
        out.insert(out.end(), v.begin(), v.end());
    }
    return out;
}

std::map<std::string, std::string> decode_str_map(ByteView in) {
    std::map<std::string, std::string> m;
    std::uint16_t count = get_u16(in, 0);
    std::size_t off = 2;
    for (std::uint16_t i = 0; i < count; ++i) {
        std::uint32_t klen = get_u32(in, off);
        off += 4;
        check_len(in, off, klen);
        std::string k(reinterpret_cast<const char*>(in.data() + off), klen);
        off += klen;
        std::uint32_t vlen = get_u32(in, off);
        off += 4;
        check_len(in, off, vlen);
        std::string v(reinterpret_cast<const char*>(in.data() + off), vlen);
        off += vlen;
        m.emplace(std::move(k), std::move(v));
    }
    if (off != in.size()) throw ParseError("trailing bytes after map");
    return m;
}

Bytes encode_i64_map(const std::map<std::string, std::int64_t>& m) {
    Bytes out;
    put_u16(out, static_cast<std::uint16_t>(m.size()));
    for (const auto& [k, v] : m) {
        put_u32(out, static_cast<std::uint32_t>(k.size()));
        out.insert(out.end(), k.begin(), k.end());
        put_i64(out, v);
    }
    return out;
}

std::map<std::string, std::int64_t> decode_i64_map(ByteView in) {
    std::map<std::string, std::int64_t> m;
    std::uint16_t count = get_u16(in, 0);
    std::size_t off = 2;
    for (std::uint16_t i = 0; i < count; ++i) {
        std::uint32_t klen = get_u32(in, off);
        off += 4;
        check_len(in, off, klen);
        std::string k(reinterpret_cast<const char*>(in.data() + off), klen);
        off += klen;
        m.emplace(std::move(k), get_i64(in, off));
        off += 8;
    }
    if (off != in.size()) throw ParseError("trailing bytes after map");
    return m;
}

Bytes encode_seq(const std::vector<Bytes>& items) {
    Bytes out;
    put_u32(out, static_cast<std::uint32_t>(items.size()));
    for (const auto& item : items) {
        put_u32(out, static_cast<std::uint32_t>(item.size()));
        out.insert(out.end(), item.begin(), item.end());
    }
    return out;
}

std::vector<Bytes> decode_seq(ByteView in) {
    std::vector<Bytes> items;
    std::uint32_t count = get_u32(in, 0);
    std::size_t off = 4;
    for (std::uint32_t i = 0; i < count; ++i) {
        std::uint32_t len = get_u32(in, off);
        off += 4;
        check_len(in, off, len);
        items.emplace_back(in.begin() + off, in.begin() + off + len);
        off += len;
    }
    if (off != in.size()) throw ParseError("trailing bytes after sequence");
    return items;
}

std::string to_hex(ByteView data) {
    static const char* digits = "0123456789abcdef";
    std::string s;
    s.reserve(data.size() * 2);
    for (std::uint8_t b : data) {
        s.push_back(digits[b >> 4]);
        s.push_back(digits[b & 0x0f]);
    }
    return s;
}

static int hex_val(char c) {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    throw ParseError("invalid hex digit");
}

Bytes from_hex(const std::string& hex) {
    if (hex.size() % 2 != 0) throw ParseError("odd-length hex string");
    Bytes out;
    out.reserve(hex.size() / 2);
    for (std::size_t i = 0; i < hex.size(); i += 2)
        out.push_back(static_cast<std::uint8_t>((hex_val(hex[i]) << 4) | hex_val(hex[i + 1])));
    return out;
}

}  // namespace tpl::serial
