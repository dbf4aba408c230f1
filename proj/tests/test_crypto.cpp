#include <doctest.h>

#include <random>

#include "tpl/crypto.hpp"

using namespace tpl;
using namespace tpl::crypto;

TEST_CASE("sha256 matches a known vector") {
    // SHA-256("abc") from FIPS 180-2
    Bytes abc{'a', 'b', 'c'};
    CHECK(sha256(abc).hex() ==
          "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST_CASE("domain tags separate otherwise identical payloads") {
    Hasher h;
    Bytes empty;
    Digest a = h.hash(DomainTag::Ledger, empty);
    Digest b = h.hash(DomainTag::EventDigest, empty);
    Digest c = h.hash(DomainTag::PotChain, empty);
    CHECK(a != b);
    CHECK(b != c);
    CHECK(a != c);
    // Ledger tag is the octet 0x00, so H(0x00 || "") = SHA-256 of one zero byte.
    Bytes one_zero{0x00};
    CHECK(a == sha256(one_zero));
}

TEST_CASE("hashing is deterministic") {
    Hasher h;
    Bytes payload{1, 2, 3, 4, 5};
    CHECK(h.hash(DomainTag::EventDigest, payload) ==
          h.hash(DomainTag::EventDigest, payload));
}

TEST_CASE("truncated-identity backend copies the payload prefix") {
    Hasher broken{Hasher::Kind::TruncatedIdentity};
    Bytes payload(40, 0xAB);
    Digest d = broken.hash(DomainTag::EventDigest, payload);
    for (auto x : d.bytes) CHECK(x == 0xAB);
    // tag is ignored, so two domains collide — that is the point of the control
    CHECK(broken.hash(DomainTag::Ledger, payload) ==
          broken.hash(DomainTag::PotChain, payload));
    // short payloads are zero padded
    Bytes shorty{0x01};
    Digest s = broken.hash(DomainTag::Ledger, shorty);
    CHECK(s.bytes[0] == 0x01);
    CHECK(s.bytes[1] == 0x00);
}

TEST_CASE("hash stream equals one-shot hash and supports snapshots") {
    Hasher h;
    Bytes payload;
    HashStream st(DomainTag::Ledger, h);
    std::mt19937_64 rng(11);
    for (int i = 0; i < 50; ++i) {
        Bytes chunk(rng() % 100);
        for (auto& x : chunk) x = static_cast<std::uint8_t>(rng());
        st.update(chunk);
        payload.insert(payload.end(), chunk.begin(), chunk.end());
        // digest() must not disturb the running state
        CHECK(st.digest() == h.hash(DomainTag::Ledger, payload));
    }
    HashStream copy = st;
    Bytes more{0xFF};
    copy.update(more);
    CHECK(st.digest() == h.hash(DomainTag::Ledger, payload));
    payload.push_back(0xFF);
    CHECK(copy.digest() == h.hash(DomainTag::Ledger, payload));
}

TEST_CASE("hash stream with broken backend matches broken one-shot") {
    Hasher broken{Hasher::Kind::TruncatedIdentity};
    HashStream st(DomainTag::Ledger, broken);
    Bytes a(10, 0x11), b(30, 0x22), c(5, 0x33);
    Bytes all;
    for (const auto* p : {&a, &b, &c}) {
        st.update(*p);
        all.insert(all.end(), p->begin(), p->end());
    }
    CHECK(st.digest() == broken.hash(DomainTag::Ledger, all));
}

TEST_CASE("digest hex round trips") {
    Digest d = sha256(Bytes{9, 9, 9});
    CHECK(Digest::from_hex(d.hex()) == d);
    CHECK_THROWS_AS(Digest::from_hex("abcd"), ParseError);
}

TEST_CASE("ed25519 sign and verify") {
    KeyPair kp = KeyPair::generate();
    Bytes msg{'h', 'i'};
    Signature sig = sign(kp.sk, msg);
    CHECK(verify(kp.pk, msg, sig));

    Bytes other{'h', 'o'};
    CHECK_FALSE(verify(kp.pk, other, sig));

    KeyPair stranger = KeyPair::generate();
    CHECK_FALSE(verify(stranger.pk, msg, sig));

    Signature tampered = sig;
    tampered.bytes[0] ^= 1;
    CHECK_FALSE(verify(kp.pk, msg, tampered));
}

TEST_CASE("seeded keypairs are deterministic") {
    Bytes seed(32, 0x42);
    KeyPair a = KeyPair::from_seed(seed);
    KeyPair b = KeyPair::from_seed(seed);
    CHECK(a.pk == b.pk);
    Bytes seed2(32, 0x43);
    CHECK(KeyPair::from_seed(seed2).pk != a.pk);
    CHECK_THROWS_AS(KeyPair::from_seed(Bytes(31, 0)), Error);
}

TEST_CASE("single-leaf merkle root is the leaf hash") {
    Hasher h;
    Bytes leaf{'c', 'o', 'i', 'n'};
    CHECK(merkle_commit({leaf}) == h.hash(DomainTag::MerkleLeaf, leaf));
}

TEST_CASE("three-leaf merkle root matches hand computation") {
    Hasher h;
    std::vector<Bytes> leaves{{0x01}, {0x02}, {0x03}};
    Digest l0 = h.hash(DomainTag::MerkleLeaf, leaves[0]);
    Digest l1 = h.hash(DomainTag::MerkleLeaf, leaves[1]);
    Digest l2 = h.hash(DomainTag::MerkleLeaf, leaves[2]);
    Bytes cat01;
    cat01.insert(cat01.end(), l0.bytes.begin(), l0.bytes.end());
    cat01.insert(cat01.end(), l1.bytes.begin(), l1.bytes.end());
    Digest n01 = h.hash(DomainTag::MerkleNode, cat01);
    Bytes top;
    top.insert(top.end(), n01.bytes.begin(), n01.bytes.end());
    top.insert(top.end(), l2.bytes.begin(), l2.bytes.end());
    CHECK(merkle_commit(leaves) == h.hash(DomainTag::MerkleNode, top));
}

TEST_CASE("merkle prove and verify round trip for 1..64 leaves") {
    std::mt19937_64 rng(3);
    for (std::size_t n = 1; n <= 64; ++n) {
        std::vector<Bytes> leaves;
        for (std::size_t i = 0; i < n; ++i) {
            Bytes leaf(8);
            for (auto& x : leaf) x = static_cast<std::uint8_t>(rng());
            leaves.push_back(leaf);
        }
        Digest root = merkle_commit(leaves);
        for (std::size_t i = 0; i < n; ++i) {
            MerkleProof proof = merkle_prove(leaves, i);
            CHECK(merkle_verify(root, leaves[i], proof));
            Bytes wrong = leaves[i];
            wrong.push_back(0x00);
            CHECK_FALSE(merkle_verify(root, wrong, proof));
        }
    }
}

TEST_CASE("merkle edge cases") {
    CHECK_THROWS_AS(merkle_commit({}), EmptyLeafSet);
    CHECK_THROWS_AS(merkle_prove({Bytes{1}}, 1), IndexOutOfRange);
}
