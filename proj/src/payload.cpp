#include "dnl/payload.hpp"

#include "dnl/error.hpp"

namespace dnl {

SparseMessage encode(const CompressedVector& c) {
  SparseMessage msg;
  msg.fired = c.fired;
  for (std::size_t j = 0; j < c.values.size(); ++j) {
    if (c.values[j] != 0.0) {
      msg.indices.push_back(static_cast<std::uint32_t>(j));
      msg.values.push_back(c.values[j]);
    }
  }
  return msg;
}

Vector decode(const SparseMessage& msg, std::size_t length) {
  if (msg.indices.size() != msg.values.size()) throw InputError("decode: ragged sparse message");
  Vector out(length, 0.0);
  for (std::size_t k = 0; k < msg.indices.size(); ++k) {
    if (msg.indices[k] >= length) throw InputError("decode: index out of range");
    out[msg.indices[k]] = msg.values[k];
  }
  return out;
}

}  // namespace dnl
