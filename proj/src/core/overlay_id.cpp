#include "pilotmesh/core/overlay_id.hpp"

#include <bit>

#include <fmt/format.h>

namespace pilotmesh {

std::uint64_t low_mask(unsigned bits) {
  return bits >= 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << bits) - 1;
}

void IdWidths::validate() const {
  if (total() == 0 || total() > 64) {
    throw std::invalid_argument(fmt::format("id widths ({},{},{}) must total 1..64 bits", enb, pilot, ms));
  }
}

SegmentOverflow::SegmentOverflow(std::string segment, std::uint64_t value, unsigned width)
    : std::out_of_range(fmt::format("{} segment value {} does not fit in {} bits", segment, value, width)),
      segment_(std::move(segment)) {}

OverlayId::OverlayId(std::uint64_t value, IdWidths widths) : value_(value), widths_(widths) {
  widths_.validate();
  if (value > low_mask(widths_.total())) {
    throw std::out_of_range(fmt::format("overlay id {} exceeds {} bits", value, widths_.total()));
  }
}

OverlayId OverlayId::encode(std::uint64_t enb, std::uint64_t pilot, std::uint64_t ms, IdWidths widths) {
  widths.validate();
  if (enb > low_mask(widths.enb)) throw SegmentOverflow("enb", enb, widths.enb);
  if (pilot > low_mask(widths.pilot)) throw SegmentOverflow("pilot", pilot, widths.pilot);
  if (ms > low_mask(widths.ms)) throw SegmentOverflow("ms", ms, widths.ms);
  // Shifts by 64 are undefined, so zero-width segments contribute nothing.
  std::uint64_t v = 0;
  if (widths.enb > 0) v = enb << (widths.pilot + widths.ms);
  if (widths.pilot > 0) v |= pilot << widths.ms;
  if (widths.ms > 0) v |= ms;
  return OverlayId(v, widths);
}

IdSegments OverlayId::decode() const {
  IdSegments s;
  s.ms = widths_.ms > 0 ? value_ & low_mask(widths_.ms) : 0;
  s.pilot = widths_.pilot > 0 ? (value_ >> widths_.ms) & low_mask(widths_.pilot) : 0;
  s.enb = widths_.enb > 0 ? (value_ >> (widths_.pilot + widths_.ms)) & low_mask(widths_.enb) : 0;
  return s;
}

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

FileKey key_from_content(std::string_view content, unsigned m, const KeyHasher& hasher) {
  if (m == 0 || m > 64) throw std::invalid_argument("key width must be 1..64 bits");
  const std::uint64_t raw = hasher(content);
  return FileKey{m == 64 ? raw : raw >> (64 - m)};
}

void check_key(FileKey key, unsigned m) {
  if (key.value > low_mask(m)) throw std::out_of_range(fmt::format("file key {} exceeds {} bits", key.value, m));
}

namespace {
unsigned common_prefix_distance(std::uint64_t a, std::uint64_t b, unsigned m) {
  const std::uint64_t diff = (a ^ b) & low_mask(m);
  if (diff == 0) return 0;
  // Bits at and below the highest differing bit are outside the common prefix.
  return static_cast<unsigned>(64 - std::countl_zero(diff));
}
}  // namespace

unsigned prefix_distance(const OverlayId& a, const OverlayId& b) {
  if (a.bits() != b.bits()) {
    throw std::invalid_argument(fmt::format("prefix_distance: width mismatch ({} vs {})", a.bits(), b.bits()));
  }
  return common_prefix_distance(a.value(), b.value(), a.bits());
}

unsigned prefix_distance(FileKey key, const OverlayId& id) {
  check_key(key, id.bits());
  return common_prefix_distance(key.value, id.value(), id.bits());
}

}  // namespace pilotmesh
