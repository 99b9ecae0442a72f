#pragma once

#include <cstdint>
#include <vector>

#include "dnl/compressors.hpp"

namespace dnl {

/// One compressed vector sent upstream, described by what the ledger needs.
struct CompressedMessageInfo {
  CompressorSpec spec;
  std::size_t length = 0;
  bool fired = true;
  std::size_t nonzeros = 0;
};

/// Everything a worker sends to the server in one round.
struct WorkerPayload {
  std::uint64_t gradient_floats = 0;    // uncompressed gradient entries
  std::uint64_t scalar_floats = 0;      // beta scalars
  std::uint64_t matrix_floats = 0;      // upper-triangle Hessian entries (naive Newton)
  std::uint64_t coefficient_floats = 0; // raw h coefficients (coefficient Newton)
  std::vector<CompressedMessageInfo> compressed;
  std::uint64_t data_vectors = 0;       // Option 1: a_ij shipped with the update
};

struct RoundPayload {
  std::vector<WorkerPayload> workers;
  std::uint64_t broadcast_floats = 0;   // downstream x broadcast
  std::uint64_t setup_floats_per_worker = 0;  // one-off uploads (BFGS initial Hessian)
};

/// Sparse wire form of a compressed vector: the server rebuilds its
/// coefficient replicas from this, never from worker memory.
struct SparseMessage {
  std::vector<std::uint32_t> indices;
  std::vector<double> values;
  bool fired = true;
};

SparseMessage encode(const CompressedVector& c);
Vector decode(const SparseMessage& msg, std::size_t length);

}  // namespace dnl
