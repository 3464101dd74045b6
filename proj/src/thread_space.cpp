#include "dmt/thread_space.hpp"

#include <cstdlib>
#include <sstream>

#include "dmt/error.hpp"

namespace dmt {

ThreadSpace::ThreadSpace(std::span<const std::int64_t> extents) {
  if (extents.empty() || extents.size() > 3)
    throw RangeError("thread space needs 1 to 3 dimensions, got " + std::to_string(extents.size()));
  dims_ = static_cast<int>(extents.size());
  for (std::size_t d = 0; d < extents.size(); ++d) {
    if (extents[d] < 1) throw RangeError("extent " + std::to_string(extents[d]) + " < 1");
    extents_[d] = extents[d];
  }
}

bool ThreadSpace::contains(const Coords& c) const noexcept {
  for (int d = 0; d < 3; ++d)
    if (c[d] < 0 || c[d] >= extents_[d]) return false;
  return true;
}

Tid ThreadSpace::linearize(const Coords& c) const {
  if (!contains(c))
    throw RangeError("coordinates (" + std::to_string(c[0]) + "," + std::to_string(c[1]) + "," +
                     std::to_string(c[2]) + ") outside " + to_string());
  return c[0] + extents_[0] * (c[1] + extents_[1] * c[2]);
}

Tid ThreadSpace::linearize(std::span<const std::int64_t> coords) const {
  if (coords.size() > 3) throw RangeError("too many coordinates");
  Coords c{0, 0, 0};
  for (std::size_t d = 0; d < coords.size(); ++d) c[d] = coords[d];
  return linearize(c);
}

Coords ThreadSpace::delinearize(Tid tid) const {
  if (tid < 0 || tid >= block_size())
    throw RangeError("tid " + std::to_string(tid) + " outside [0," + std::to_string(block_size()) + ")");
  Coords c{};
  c[0] = tid % extents_[0];
  tid /= extents_[0];
  c[1] = tid % extents_[1];
  c[2] = tid / extents_[1];
  return c;
}

std::string ThreadSpace::to_string() const {
  std::string s = std::to_string(extents_[0]);
  for (int d = 1; d < dims_; ++d) s += "x" + std::to_string(extents_[d]);
  return s;
}

ThreadSpace ThreadSpace::parse(const std::string& text) {
  std::vector<std::int64_t> ext;
  std::stringstream ss(text);
  std::string part;
  while (std::getline(ss, part, 'x')) {
    char* end = nullptr;
    long long v = std::strtoll(part.c_str(), &end, 10);
    if (part.empty() || *end != '\0') throw RangeError("bad extents '" + text + "'");
    ext.push_back(v);
  }
  return ThreadSpace(ext);
}

std::string TidDelta::to_string() const {
  std::string s = "(" + std::to_string(offsets[0]);
  for (int d = 1; d < dims; ++d) s += "," + std::to_string(offsets[d]);
  return s + ")";
}

std::int64_t delta_to_linear(const TidDelta& delta, const ThreadSpace& space) {
  std::int64_t linear = 0;
  std::int64_t stride = 1;
  for (int d = 0; d < 3; ++d) {
    if (std::llabs(delta.offsets[d]) >= space.extent(d) && delta.offsets[d] != 0)
      throw RangeError("delta " + delta.to_string() + " dimension " + std::to_string(d) +
                       " reaches extent " + std::to_string(space.extent(d)));
    linear += delta.offsets[d] * stride;
    stride *= space.extent(d);
  }
  return linear;
}

namespace {

std::optional<Tid> shifted(const ThreadSpace& space, const TidDelta& shift, std::int64_t window,
                           Tid from, int sign) {
  if (from < 0 || from >= space.block_size()) return std::nullopt;
  Coords c = space.delinearize(from);
  for (int d = 0; d < 3; ++d) c[d] += sign * shift.offsets[d];
  if (!space.contains(c)) return std::nullopt;
  Tid to = space.linearize(c);
  if (window > 0 && to / window != from / window) return std::nullopt;
  return to;
}

}  // namespace

std::optional<Tid> comm_target(const ThreadSpace& space, const TidDelta& shift, std::int64_t window,
                               Tid src) {
  return shifted(space, shift, window, src, +1);
}

std::optional<Tid> comm_source(const ThreadSpace& space, const TidDelta& shift, std::int64_t window,
                               Tid dst) {
  return shifted(space, shift, window, dst, -1);
}

}  // namespace dmt
