#include "hsmoney/signature.hpp"

#include <sodium.h>

#include <array>
#include <cstring>

namespace hsm {

namespace {

using Hash = std::array<std::uint8_t, MerkleLamport::kHashBytes>;

void ensure_sodium() {
  static const bool ok = sodium_init() >= 0;
  if (!ok) throw std::runtime_error("libsodium initialization failed");
}

Hash sha256(const std::uint8_t* data, std::size_t len) {
  Hash h;
  crypto_hash_sha256(h.data(), data, len);
  return h;
}

Hash hash_pair(const Hash& left, const Hash& right) {
  std::array<std::uint8_t, 64> buf;
  std::memcpy(buf.data(), left.data(), 32);
  std::memcpy(buf.data() + 32, right.data(), 32);
  return sha256(buf.data(), buf.size());
}

Hash preimage(const Hash& seed, std::uint32_t leaf, std::uint32_t bit, std::uint32_t value) {
  std::array<std::uint8_t, 32 + 9> buf{};
  std::memcpy(buf.data(), seed.data(), 32);
  for (int i = 0; i < 4; ++i) buf[32 + i] = static_cast<std::uint8_t>(leaf >> (24 - 8 * i));
  buf[36] = static_cast<std::uint8_t>(bit >> 8);
  buf[37] = static_cast<std::uint8_t>(bit);
  buf[38] = static_cast<std::uint8_t>(value);
  return sha256(buf.data(), buf.size());
}

// Leaf public key = SHA-256 over the 512 hashes h[i][b], ordered (i, b).
Hash leaf_from_hashes(const std::vector<Hash>& hashes) {
  return sha256(hashes.front().data(), hashes.size() * 32);
}

Hash leaf_public(const Hash& seed, std::uint32_t leaf) {
  std::vector<Hash> hashes(2 * MerkleLamport::kDigestBits);
  for (std::uint32_t i = 0; i < MerkleLamport::kDigestBits; ++i) {
    for (std::uint32_t b = 0; b < 2; ++b) {
      Hash pre = preimage(seed, leaf, i, b);
      hashes[2 * i + b] = sha256(pre.data(), pre.size());
    }
  }
  return leaf_from_hashes(hashes);
}

bool digest_bit(const Hash& digest, std::size_t i) { return (digest[i / 8] >> (7 - i % 8)) & 1u; }

class MerkleLamportKey final : public SigningKey {
 public:
  Hash seed{};
  // levels[0] holds the leaves; levels[height] holds the root.
  std::vector<std::vector<Hash>> levels;
  std::uint32_t next_leaf = 0;
  std::mutex mu;
};

}  // namespace

std::string to_hex(std::span<const std::uint8_t> bytes) {
  static const char* digits = "0123456789abcdef";
  std::string out;
  out.reserve(bytes.size() * 2);
  for (std::uint8_t b : bytes) {
    out.push_back(digits[b >> 4]);
    out.push_back(digits[b & 15]);
  }
  return out;
}

Bytes from_hex(std::string_view hex) {
  if (hex.size() % 2 != 0) throw std::invalid_argument("from_hex: odd length");
  auto nibble = [](char c) -> int {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    throw std::invalid_argument("from_hex: invalid digit");
  };
  Bytes out(hex.size() / 2);
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = static_cast<std::uint8_t>(nibble(hex[2 * i]) << 4 | nibble(hex[2 * i + 1]));
  }
  return out;
}

MerkleLamport::MerkleLamport(int height, std::size_t max_message_bytes)
    : height_(height), max_message_bytes_(max_message_bytes) {
  if (height < 0 || height > 20) throw std::invalid_argument("MerkleLamport: height must lie in [0, 20]");
  ensure_sodium();
}

std::size_t MerkleLamport::signature_bytes() const {
  return 4 + 2 * kDigestBits * kHashBytes + static_cast<std::size_t>(height_) * kHashBytes;
}

SigKeyPair MerkleLamport::keygen(Rng& rng) const {
  auto key = std::make_shared<MerkleLamportKey>();
  for (std::size_t i = 0; i < key->seed.size(); i += 8) {
    std::uint64_t w = rng.next_u64();
    std::memcpy(key->seed.data() + i, &w, 8);
  }
  const std::uint32_t leaves = 1u << height_;
  key->levels.emplace_back(leaves);
  for (std::uint32_t l = 0; l < leaves; ++l) key->levels[0][l] = leaf_public(key->seed, l);
  for (int h = 1; h <= height_; ++h) {
    const std::vector<Hash>& below = key->levels[h - 1];
    std::vector<Hash> level(below.size() / 2);
    for (std::size_t i = 0; i < level.size(); ++i) level[i] = hash_pair(below[2 * i], below[2 * i + 1]);
    key->levels.push_back(std::move(level));
  }
  Bytes pk;
  pk.push_back(static_cast<std::uint8_t>(height_));
  const Hash& root = key->levels.back().front();
  pk.insert(pk.end(), root.begin(), root.end());
  return {key, pk};
}

Bytes MerkleLamport::sign(SigningKey& sk, std::span<const std::uint8_t> msg) const {
  auto* key = dynamic_cast<MerkleLamportKey*>(&sk);
  if (key == nullptr) throw std::invalid_argument("MerkleLamport::sign: foreign key");
  if (msg.size() > max_message_bytes_) throw std::length_error("MerkleLamport::sign: message too long");
  if (static_cast<int>(key->levels.size()) != height_ + 1) {
    throw std::invalid_argument("MerkleLamport::sign: key height mismatch");
  }
  std::uint32_t leaf = 0;
  {
    std::lock_guard<std::mutex> lock(key->mu);
    if (key->next_leaf >= (1u << height_)) throw KeyExhausted("MerkleLamport: all one-time keys used");
    leaf = key->next_leaf++;
  }
  const Hash digest = sha256(msg.data(), msg.size());
  Bytes sig;
  sig.reserve(signature_bytes());
  for (int i = 0; i < 4; ++i) sig.push_back(static_cast<std::uint8_t>(leaf >> (24 - 8 * i)));
  for (std::size_t i = 0; i < kDigestBits; ++i) {
    Hash pre = preimage(key->seed, leaf, static_cast<std::uint32_t>(i), digest_bit(digest, i) ? 1 : 0);
    sig.insert(sig.end(), pre.begin(), pre.end());
  }
  for (std::size_t i = 0; i < kDigestBits; ++i) {
    Hash pre = preimage(key->seed, leaf, static_cast<std::uint32_t>(i), digest_bit(digest, i) ? 0 : 1);
    Hash other = sha256(pre.data(), pre.size());
    sig.insert(sig.end(), other.begin(), other.end());
  }
  std::uint32_t idx = leaf;
  for (int h = 0; h < height_; ++h) {
    const Hash& sibling = key->levels[h][idx ^ 1u];
    sig.insert(sig.end(), sibling.begin(), sibling.end());
    idx >>= 1;
  }
  return sig;
}

SigVerdict MerkleLamport::verify(std::span<const std::uint8_t> pk, std::span<const std::uint8_t> msg,
                                 std::span<const std::uint8_t> sig) const {
  if (pk.size() != 1 + kHashBytes || pk[0] != height_) return SigVerdict::kMalformed;
  if (sig.size() != signature_bytes()) return SigVerdict::kMalformed;
  if (msg.size() > max_message_bytes_) return SigVerdict::kInvalid;
  std::uint32_t leaf = 0;
  for (int i = 0; i < 4; ++i) leaf = (leaf << 8) | sig[i];
  if (leaf >= (1u << height_)) return SigVerdict::kMalformed;

  const Hash digest = sha256(msg.data(), msg.size());
  const std::uint8_t* revealed = sig.data() + 4;
  const std::uint8_t* others = revealed + kDigestBits * kHashBytes;
  const std::uint8_t* path = others + kDigestBits * kHashBytes;
  std::vector<Hash> hashes(2 * kDigestBits);
  for (std::size_t i = 0; i < kDigestBits; ++i) {
    const int b = digest_bit(digest, i) ? 1 : 0;
    hashes[2 * i + b] = sha256(revealed + i * kHashBytes, kHashBytes);
    std::memcpy(hashes[2 * i + (1 - b)].data(), others + i * kHashBytes, kHashBytes);
  }
  Hash node = leaf_from_hashes(hashes);
  std::uint32_t idx = leaf;
  for (int h = 0; h < height_; ++h) {
    Hash sibling;
    std::memcpy(sibling.data(), path + h * kHashBytes, kHashBytes);
    node = (idx & 1u) ? hash_pair(sibling, node) : hash_pair(node, sibling);
    idx >>= 1;
  }
  return std::memcmp(node.data(), pk.data() + 1, kHashBytes) == 0 ? SigVerdict::kValid
                                                                    : SigVerdict::kInvalid;
}

}  // namespace hsm
