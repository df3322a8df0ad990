#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "sonni/util.hpp"

namespace sonni {

// Party key identifiers. The mock scheme only ever sees two secret keys:
// the client's and the provider's.
using KeyId = uint8_t;
constexpr KeyId kClientKey = 'c';
constexpr KeyId kProviderKey = 'p';

// Small sorted set of key ids. Union is the only combining operation the
// multikey algebra needs.
class KeySet {
 public:
  KeySet() = default;
  explicit KeySet(std::initializer_list<KeyId> ids) {
    for (KeyId id : ids) insert(id);
  }

  void insert(KeyId id) {
    auto it = std::lower_bound(ids_.begin(), ids_.end(), id);
    if (it == ids_.end() || *it != id) ids_.insert(it, id);
  }

  bool contains(KeyId id) const {
    return std::binary_search(ids_.begin(), ids_.end(), id);
  }

  size_t size() const { return ids_.size(); }
  bool empty() const { return ids_.empty(); }
  const std::vector<KeyId>& ids() const { return ids_; }

  KeySet united(const KeySet& other) const {
    KeySet out = *this;
    for (KeyId id : other.ids_) out.insert(id);
    return out;
  }

  bool operator==(const KeySet& other) const { return ids_ == other.ids_; }
  bool operator!=(const KeySet& other) const { return !(*this == other); }

  // Canonical encoding: count byte, then sorted ids.
  void encode(std::vector<uint8_t>& out) const {
    if (ids_.size() > 255) throw std::length_error("keyset too large");
    out.push_back(static_cast<uint8_t>(ids_.size()));
    out.insert(out.end(), ids_.begin(), ids_.end());
  }

  static KeySet decode(ByteReader& r) {
    uint8_t n = r.u8();
    KeySet ks;
    KeyId prev = 0;
    for (uint8_t i = 0; i < n; ++i) {
      KeyId id = r.u8();
      if (i > 0 && id <= prev) throw std::runtime_error("keyset ids not strictly increasing");
      ks.ids_.push_back(id);
      prev = id;
    }
    return ks;
  }

  std::string str() const {
    std::string s = "{";
    for (size_t i = 0; i < ids_.size(); ++i) {
      if (i) s += ",";
      s += static_cast<char>(ids_[i]);
    }
    s += "}";
    return s;
  }

 private:
  std::vector<KeyId> ids_;
};

// Mock secret key: 16 opaque bytes drawn from the party's rng. Only used to
// seed the deterministic share-splitting in partial decryption.
struct KeyPair {
  KeyId id = 0;
  std::array<uint8_t, 16> secret{};
};

}  // namespace sonni
