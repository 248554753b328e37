#pragma once

#include <cstdint>
#include <memory>
#include <mutex>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "hsmoney/rng.hpp"

namespace hsm {

using Bytes = std::vector<std::uint8_t>;

std::string to_hex(std::span<const std::uint8_t> bytes);
Bytes from_hex(std::string_view hex);

enum class SigVerdict { kValid, kInvalid, kMalformed };

class KeyExhausted : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Opaque, possibly stateful signing key.
class SigningKey {
 public:
  virtual ~SigningKey() = default;
};

struct SigKeyPair {
  std::shared_ptr<SigningKey> secret;
  Bytes public_key;
};

/// Classical digital signature scheme (keygen, sign, verify).
class SignatureScheme {
 public:
  virtual ~SignatureScheme() = default;
  virtual SigKeyPair keygen(Rng& rng) const = 0;
  virtual Bytes sign(SigningKey& sk, std::span<const std::uint8_t> msg) const = 0;
  virtual SigVerdict verify(std::span<const std::uint8_t> pk, std::span<const std::uint8_t> msg,
                            std::span<const std::uint8_t> sig) const = 0;
  bool sverify(std::span<const std::uint8_t> pk, std::span<const std::uint8_t> msg,
               std::span<const std::uint8_t> sig) const {
    return verify(pk, msg, sig) == SigVerdict::kValid;
  }
};

/// Lamport one-time signatures over SHA-256 with a Merkle tree of 2^height one-time keys.
///
/// Public key: height byte followed by the 32-byte Merkle root. A signature is the 4-byte
/// big-endian leaf index, 256 revealed preimages, the 256 unrevealed leaf hashes and the
/// authentication path. Signing a message consumes one leaf.
class MerkleLamport final : public SignatureScheme {
 public:
  static constexpr std::size_t kHashBytes = 32;
  static constexpr std::size_t kDigestBits = 256;

  explicit MerkleLamport(int height = 10, std::size_t max_message_bytes = 1 << 16);

  int height() const { return height_; }
  std::size_t signature_bytes() const;

  SigKeyPair keygen(Rng& rng) const override;
  Bytes sign(SigningKey& sk, std::span<const std::uint8_t> msg) const override;
  SigVerdict verify(std::span<const std::uint8_t> pk, std::span<const std::uint8_t> msg,
                    std::span<const std::uint8_t> sig) const override;

 private:
  int height_;
  std::size_t max_message_bytes_;
};

}  // namespace hsm
