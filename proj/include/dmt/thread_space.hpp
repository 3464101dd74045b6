#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace dmt {

using Tid = std::int64_t;
using Coords = std::array<std::int64_t, 3>;

/// Shape of a thread block. Linearization is row-major with dimension 0
/// (threadIdx.x) fastest.
class ThreadSpace {
 public:
  ThreadSpace() = default;
  /// 1 to 3 extents, each >= 1. Throws RangeError otherwise.
  explicit ThreadSpace(std::span<const std::int64_t> extents);
  ThreadSpace(std::initializer_list<std::int64_t> extents)
      : ThreadSpace(std::span<const std::int64_t>(extents.begin(), extents.size())) {}

  int dims() const noexcept { return dims_; }
  std::int64_t extent(int dim) const noexcept { return extents_[dim]; }
  std::int64_t block_size() const noexcept { return extents_[0] * extents_[1] * extents_[2]; }

  bool contains(const Coords& c) const noexcept;
  Tid linearize(const Coords& c) const;
  Tid linearize(std::span<const std::int64_t> coords) const;
  Coords delinearize(Tid tid) const;

  /// "8x8"-style rendering.
  std::string to_string() const;
  /// Inverse of to_string(); accepts "64", "8x8", "4x4x2".
  static ThreadSpace parse(const std::string& text);

  friend bool operator==(const ThreadSpace&, const ThreadSpace&) = default;

 private:
  int dims_ = 1;
  Coords extents_{1, 1, 1};
};

/// Constant per-dimension thread-id offset.
struct TidDelta {
  Coords offsets{0, 0, 0};
  int dims = 1;

  static TidDelta linear_only(std::int64_t d) { return TidDelta{{d, 0, 0}, 1}; }
  TidDelta negated() const noexcept { return TidDelta{{-offsets[0], -offsets[1], -offsets[2]}, dims}; }
  bool is_zero() const noexcept { return offsets[0] == 0 && offsets[1] == 0 && offsets[2] == 0; }
  std::string to_string() const;
  friend bool operator==(const TidDelta&, const TidDelta&) = default;
};

/// Linear tid difference for `delta` under `space`. Throws RangeError when any
/// offset magnitude reaches its extent.
std::int64_t delta_to_linear(const TidDelta& delta, const ThreadSpace& space);

/// Receiver of the token sent by `src` under a shift: must lie inside the space
/// in every dimension and inside src's window group. nullopt when invalid.
std::optional<Tid> comm_target(const ThreadSpace& space, const TidDelta& shift,
                               std::int64_t window, Tid src);
/// Producer feeding `dst` under a shift, with the same validity rule.
std::optional<Tid> comm_source(const ThreadSpace& space, const TidDelta& shift,
                               std::int64_t window, Tid dst);

}  // namespace dmt
