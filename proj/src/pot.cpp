#include "tpl/pot.hpp"

namespace tpl::pot {

Digest event_digest(const TreasuryEvent& e, const Hasher& hasher) {
    return hasher.hash(crypto::DomainTag::EventDigest, e.body_bytes());
}

Digest chain_value(const Digest& r_prev, const Digest& h, const std::string& d_src,
                   const std::string& d_dst, std::uint64_t t, const Hasher& hasher) {
    serial::TlvWriter w(serial::RecordTag::ChainLink);
    w.field_bytes(1, r_prev.view());
    w.field_bytes(2, h.view());
    w.field_str(3, d_src);
    w.field_str(4, d_dst);
    w.field_u64(5, t);
    return hasher.hash(crypto::DomainTag::PotChain, w.finish());
}

Bytes signature_message(const Digest& h, const std::string& d_src,
                        const std::string& d_dst, std::uint64_t t, const Digest& r) {
    serial::TlvWriter w(serial::RecordTag::SigMessage);
    w.field_bytes(1, h.view());
    w.field_str(2, d_src);
    w.field_str(3, d_dst);
    w.field_u64(4, t);
    w.field_bytes(5, r.view());
    return w.finish();
}

Bytes PoTRecord::serialize() const {
    serial::TlvWriter w(serial::RecordTag::PotRecord);
    w.field_u64(1, index);
    w.field_bytes(2, event.serialize());
    w.field_bytes(3, h.view());
    w.field_bytes(4, r.view());
    w.field_bytes(5, sig_treasury.view());
    w.field_bytes(6, sig_provider.view());
    return w.finish();
}

PoTRecord PoTRecord::deserialize(ByteView in) {
    serial::TlvRecord rec = serial::TlvRecord::parse(in);
    if (rec.tag != static_cast<std::uint8_t>(serial::RecordTag::PotRecord))
        throw UnsupportedRecord("expected a receipt record");
    PoTRecord out;
    out.index = rec.require_u64(1);
    out.event = TreasuryEvent::deserialize(rec.require_bytes(2));
    auto fixed = [&](std::uint8_t id, auto& dst) {
        ByteView b = rec.require_bytes(id);
        if (b.size() != dst.size()) throw ParseError("bad fixed-width field length");
        std::copy(b.begin(), b.end(), dst.begin());
    };
    fixed(3, out.h.bytes);
    fixed(4, out.r.bytes);
    fixed(5, out.sig_treasury.bytes);
    fixed(6, out.sig_provider.bytes);
    return out;
}

const PoTRecord& append_receipt(PoTChain& chain, const TreasuryEvent& e,
                                const SecretKey& treasury_sk,
                                const SecretKey& provider_sk) {
    PoTRecord rec;
    rec.index = chain.records.size() + 1;
    rec.event = e;
    rec.h = event_digest(e, chain.hasher);
    rec.r = chain_value(chain.head(), rec.h, e.d_src, e.d_dst, e.t, chain.hasher);
    Bytes msg = signature_message(rec.h, e.d_src, e.d_dst, e.t, rec.r);
    rec.sig_treasury = crypto::sign(treasury_sk, msg);
    rec.sig_provider = crypto::sign(provider_sk, msg);
    chain.records.push_back(std::move(rec));
    return chain.records.back();
}

std::optional<Divergence> verify_chain(const PoTChain& chain, const PublicKey& treasury_pk,
                                       const PublicKey& provider_pk) {
    Digest prev = PoTChain::seed();
    for (std::size_t i = 0; i < chain.records.size(); ++i) {
        const PoTRecord& rec = chain.records[i];
        std::uint64_t idx = i + 1;
        if (rec.index != idx || event_digest(rec.event, chain.hasher) != rec.h ||
            chain_value(prev, rec.h, rec.event.d_src, rec.event.d_dst, rec.event.t,
                        chain.hasher) != rec.r)
            return Divergence{idx, DivergenceCause::HashLink};
        Bytes msg = signature_message(rec.h, rec.event.d_src, rec.event.d_dst,
                                      rec.event.t, rec.r);
        if (!crypto::verify(treasury_pk, msg, rec.sig_treasury))
            return Divergence{idx, DivergenceCause::TreasurySig};
        if (!crypto::verify(provider_pk, msg, rec.sig_provider))
            return Divergence{idx, DivergenceCause::ProviderSig};
        prev = rec.r;
    }
    return std::nullopt;
}

std::optional<std::uint64_t> first_divergence(const PoTChain& a, const PoTChain& b) {
    std::size_t n = std::min(a.records.size(), b.records.size());
    for (std::size_t i = 0; i < n; ++i)
        if (a.records[i].serialize() != b.records[i].serialize())
            return i + 1;
    return std::nullopt;
}

}  // namespace tpl::pot
