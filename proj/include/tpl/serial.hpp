#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "tpl/errors.hpp"

namespace tpl::serial {

using Bytes = std::vector<std::uint8_t>;
using ByteView = std::span<const std::uint8_t>;

// Record-type tags for the canonical TLV encoding. One octet each; the layout
// is [tag][field count: u16 BE][per field: id u8, length u32 BE, payload].
// Fields appear in strictly increasing id order, integers are i64 big-endian
// two's complement, and every variable-length element is length-prefixed, so
// the encoding is injective over the closed record set.
enum class RecordTag : std::uint8_t {
    EventBody = 0x01,      // (evid, v, m) — input of the per-event digest
    TreasuryEvent = 0x02,  // (t, d_src, d_dst, v, evid, m)
    ChainLink = 0x03,      // (R_prev, h, d_src, d_dst, t)
    SigMessage = 0x04,     // (h, d_src, d_dst, t, R)
    PotRecord = 0x05,
    CoinRecord = 0x06,
    Snapshot = 0x07,
    AnchorMeta = 0x08,
    LedgerRecord = 0x09,
    ViewTable = 0x0A,
    SimBlock = 0x0B,
};

void put_u16(Bytes& out, std::uint16_t v);
void put_u32(Bytes& out, std::uint32_t v);
void put_u64(Bytes& out, std::uint64_t v);
void put_i64(Bytes& out, std::int64_t v);

std::uint16_t get_u16(ByteView in, std::size_t offset);
std::uint32_t get_u32(ByteView in, std::size_t offset);
std::uint64_t get_u64(ByteView in, std::size_t offset);
std::int64_t get_i64(ByteView in, std::size_t offset);

/// Builder for one canonical TLV record. Fields must be added in strictly
/// increasing id order; finish() patches the field count into the header.
class TlvWriter {
public:
    explicit TlvWriter(RecordTag tag);

    void field_bytes(std::uint8_t id, ByteView data);
    void field_str(std::uint8_t id, const std::string& s);
    void field_i64(std::uint8_t id, std::int64_t v);
    void field_u64(std::uint8_t id, std::uint64_t v);

    Bytes finish();

private:
    Bytes buf_;
    std::uint16_t count_ = 0;
    int last_id_ = -1;
    bool finished_ = false;
};

struct TlvField {
    std::uint8_t id;
    Bytes data;
};

/// Parsed TLV record with typed field accessors.
struct TlvRecord {
    std::uint8_t tag = 0;
    std::vector<TlvField> fields;

    static TlvRecord parse(ByteView in);

    const TlvField* find(std::uint8_t id) const;
    ByteView require_bytes(std::uint8_t id) const;
    std::string require_str(std::uint8_t id) const;
    std::int64_t require_i64(std::uint8_t id) const;
    std::uint64_t require_u64(std::uint8_t id) const;
};

/// Deterministic encoding for string->string metadata maps: u16 BE pair
/// count, then per pair (u32 BE key length, key, u32 BE value length, value),
/// keys in lexicographic order.
Bytes encode_str_map(const std::map<std::string, std::string>& m);
std::map<std::string, std::string> decode_str_map(ByteView in);

/// Same framing for string->i64 maps (per-domain totals and exposures).
Bytes encode_i64_map(const std::map<std::string, std::int64_t>& m);
std::map<std::string, std::int64_t> decode_i64_map(ByteView in);

/// Length-prefixed sequence framing: u32 BE element count, then per element
/// u32 BE length and the element bytes.
Bytes encode_seq(const std::vector<Bytes>& items);
std::vector<Bytes> decode_seq(ByteView in);

std::string to_hex(ByteView data);
Bytes from_hex(const std::string& hex);

}  // namespace tpl::serial
