#include "tpl/crypto.hpp"

#include <sodium.h>

#include <cstring>
#include <mutex>

namespace tpl::crypto {

namespace {

void ensure_sodium() {
    static std::once_flag once;
    std::call_once(once, [] {
        if (sodium_init() < 0) throw Error("libsodium initialisation failed");
    });
}

}  // namespace

std::string Digest::hex() const { return serial::to_hex(view()); }

Digest Digest::from_hex(const std::string& hex) {
    Bytes b = serial::from_hex(hex);
    if (b.size() != kDigestSize) throw ParseError("digest hex has wrong length");
    Digest d;
    std::memcpy(d.bytes.data(), b.data(), kDigestSize);
    return d;
}

Digest Hasher::hash(DomainTag tag, ByteView payload) const {
    ensure_sodium();
    Digest out;
    if (kind == Kind::Sha256) {
        crypto_hash_sha256_state st;
        crypto_hash_sha256_init(&st);
        std::uint8_t t = static_cast<std::uint8_t>(tag);
        crypto_hash_sha256_update(&st, &t, 1);
        crypto_hash_sha256_update(&st, payload.data(), payload.size());
        crypto_hash_sha256_final(&st, out.bytes.data());
    } else {
        std::size_t n = std::min(payload.size(), kDigestSize);
        std::memcpy(out.bytes.data(), payload.data(), n);
    }
    return out;
}

Digest sha256(ByteView payload) {
    ensure_sodium();
    Digest out;
    crypto_hash_sha256(out.bytes.data(), payload.data(), payload.size());
    return out;
}

HashStream::HashStream(DomainTag tag, Hasher hasher)
    : hasher_(hasher), sha_state_(nullptr) {
    ensure_sodium();
    if (hasher_.kind == Hasher::Kind::Sha256) {
        auto* st = new crypto_hash_sha256_state;
        crypto_hash_sha256_init(st);
        std::uint8_t t = static_cast<std::uint8_t>(tag);
        crypto_hash_sha256_update(st, &t, 1);
        sha_state_ = st;
    }
}

HashStream::HashStream(const HashStream& other)
    : hasher_(other.hasher_), sha_state_(nullptr), prefix_(other.prefix_), total_(other.total_) {
    if (other.sha_state_) {
        sha_state_ = new crypto_hash_sha256_state(
            *static_cast<crypto_hash_sha256_state*>(other.sha_state_));
    }
}

HashStream& HashStream::operator=(const HashStream& other) {
    if (this == &other) return *this;
    delete static_cast<crypto_hash_sha256_state*>(sha_state_);
    sha_state_ = nullptr;
    hasher_ = other.hasher_;
    prefix_ = other.prefix_;
    total_ = other.total_;
    if (other.sha_state_) {
        sha_state_ = new crypto_hash_sha256_state(
            *static_cast<crypto_hash_sha256_state*>(other.sha_state_));
    }
    return *this;
}

HashStream::~HashStream() { delete static_cast<crypto_hash_sha256_state*>(sha_state_); }

void HashStream::update(ByteView data) {
    total_ += data.size();
    if (sha_state_) {
        crypto_hash_sha256_update(static_cast<crypto_hash_sha256_state*>(sha_state_),
                                  data.data(), data.size());
    } else if (prefix_.size() < kDigestSize) {
        std::size_t need = kDigestSize - prefix_.size();
        std::size_t take = std::min(need, data.size());
        prefix_.insert(prefix_.end(), data.begin(), data.begin() + take);
    }
}

Digest HashStream::digest() const {
    Digest out;
    if (sha_state_) {
        crypto_hash_sha256_state copy =
            *static_cast<crypto_hash_sha256_state*>(sha_state_);
        crypto_hash_sha256_final(&copy, out.bytes.data());
    } else {
        std::memcpy(out.bytes.data(), prefix_.data(), prefix_.size());
    }
    return out;
}

std::string PublicKey::hex() const { return serial::to_hex(view()); }

PublicKey PublicKey::from_hex(const std::string& hex) {
    Bytes b = serial::from_hex(hex);
    if (b.size() != kPublicKeySize) throw ParseError("public key hex has wrong length");
    PublicKey pk;
    std::memcpy(pk.bytes.data(), b.data(), b.size());
    return pk;
}

std::string SecretKey::hex() const { return serial::to_hex(view()); }

SecretKey SecretKey::from_hex(const std::string& hex) {
    Bytes b = serial::from_hex(hex);
    if (b.size() != kSecretKeySize) throw ParseError("secret key hex has wrong length");
    SecretKey sk;
    std::memcpy(sk.bytes.data(), b.data(), b.size());
    return sk;
}

KeyPair KeyPair::generate() {
    ensure_sodium();
    KeyPair kp;
    crypto_sign_keypair(kp.pk.bytes.data(), kp.sk.bytes.data());
    return kp;
}

KeyPair KeyPair::from_seed(ByteView seed32) {
    ensure_sodium();
    if (seed32.size() != crypto_sign_SEEDBYTES)
        throw Error("keypair seed must be 32 octets");
    KeyPair kp;
    crypto_sign_seed_keypair(kp.pk.bytes.data(), kp.sk.bytes.data(), seed32.data());
    return kp;
}

Signature sign(const SecretKey& sk, ByteView message) {
    ensure_sodium();
    Signature sig;
    if (crypto_sign_detached(sig.bytes.data(), nullptr, message.data(), message.size(),
                             sk.bytes.data()) != 0)
        throw SigningFailure("ed25519 signing failed");
    return sig;
}

bool verify(const PublicKey& pk, ByteView message, const Signature& sig) {
    ensure_sodium();
    return crypto_sign_verify_detached(sig.bytes.data(), message.data(), message.size(),
                                       pk.bytes.data()) == 0;
}

namespace {

std::vector<Digest> leaf_level(const std::vector<Bytes>& leaves, const Hasher& hasher) {
    std::vector<Digest> level;
    level.reserve(leaves.size());
    for (const auto& leaf : leaves) level.push_back(hasher.hash(DomainTag::MerkleLeaf, leaf));
    return level;
}

Digest parent(const Digest& left, const Digest& right, const Hasher& hasher) {
    Bytes buf;
    buf.insert(buf.end(), left.bytes.begin(), left.bytes.end());
    buf.insert(buf.end(), right.bytes.begin(), right.bytes.end());
    return hasher.hash(DomainTag::MerkleNode, buf);
}

}  // namespace

Digest merkle_commit(const std::vector<Bytes>& leaves, const Hasher& hasher) {
    if (leaves.empty()) throw EmptyLeafSet();
    std::vector<Digest> level = leaf_level(leaves, hasher);
    while (level.size() > 1) {
        std::vector<Digest> next;
        next.reserve((level.size() + 1) / 2);
        for (std::size_t i = 0; i + 1 < level.size(); i += 2)
            next.push_back(parent(level[i], level[i + 1], hasher));
        if (level.size() % 2 == 1) next.push_back(level.back());
        level = std::move(next);
    }
    return level.front();
}

MerkleProof merkle_prove(const std::vector<Bytes>& leaves, std::size_t index,
                         const Hasher& hasher) {
    if (leaves.empty()) throw EmptyLeafSet();
    if (index >= leaves.size())
        throw IndexOutOfRange("merkle proof index " + std::to_string(index) +
                              " out of range for " + std::to_string(leaves.size()) + " leaves");
    std::vector<Digest> level = leaf_level(leaves, hasher);
    MerkleProof proof;
    std::size_t pos = index;
    while (level.size() > 1) {
        std::size_t sibling = (pos % 2 == 0) ? pos + 1 : pos - 1;
        if (sibling < level.size())
            proof.push_back(MerkleStep{level[sibling], sibling < pos});
        std::vector<Digest> next;
        next.reserve((level.size() + 1) / 2);
        for (std::size_t i = 0; i + 1 < level.size(); i += 2)
            next.push_back(parent(level[i], level[i + 1], hasher));
        if (level.size() % 2 == 1) next.push_back(level.back());
        pos /= 2;
        level = std::move(next);
    }
    return proof;
}

bool merkle_verify(const Digest& root, ByteView leaf, const MerkleProof& proof,
                   const Hasher& hasher) {
    Digest acc = hasher.hash(DomainTag::MerkleLeaf, leaf);
    for (const auto& step : proof)
        acc = step.sibling_on_left ? parent(step.sibling, acc, hasher)
                                   : parent(acc, step.sibling, hasher);
    return acc == root;
}

}  // namespace tpl::crypto
