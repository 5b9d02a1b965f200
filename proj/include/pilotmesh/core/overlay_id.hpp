#pragma once

#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace pilotmesh {

/// Segment widths of a composite overlay identifier, most significant first:
/// eNodeB | pilot | mobile station. Total width is at most 64 bits.
struct IdWidths {
  unsigned enb = 8;
  unsigned pilot = 8;
  unsigned ms = 16;

  unsigned total() const { return enb + pilot + ms; }
  void validate() const;

  friend bool operator==(const IdWidths&, const IdWidths&) = default;
};

struct IdSegments {
  std::uint64_t enb = 0;
  std::uint64_t pilot = 0;
  std::uint64_t ms = 0;

  friend bool operator==(const IdSegments&, const IdSegments&) = default;
};

/// Thrown by encode when a segment value does not fit its width.
class SegmentOverflow : public std::out_of_range {
 public:
  SegmentOverflow(std::string segment, std::uint64_t value, unsigned width);
  const std::string& segment() const { return segment_; }

 private:
  std::string segment_;
};

class OverlayId {
 public:
  OverlayId() = default;
  /// Wraps a raw value; throws std::out_of_range if value >= 2^m.
  OverlayId(std::uint64_t value, IdWidths widths);

  static OverlayId encode(std::uint64_t enb, std::uint64_t pilot, std::uint64_t ms, IdWidths widths);
  IdSegments decode() const;

  std::uint64_t value() const { return value_; }
  const IdWidths& widths() const { return widths_; }
  unsigned bits() const { return widths_.total(); }

  friend bool operator==(const OverlayId&, const OverlayId&) = default;
  friend auto operator<=>(const OverlayId& a, const OverlayId& b) { return a.value_ <=> b.value_; }

 private:
  std::uint64_t value_ = 0;
  IdWidths widths_{};
};

/// A shared-file key in the same m-bit space as overlay identifiers.
struct FileKey {
  std::uint64_t value = 0;

  friend bool operator==(const FileKey&, const FileKey&) = default;
  friend auto operator<=>(const FileKey&, const FileKey&) = default;
};

/// Maps file content (or a name) to 64 raw bits; keys keep the top m of them.
using KeyHasher = std::function<std::uint64_t(std::string_view)>;

/// FNV-1a, 64-bit. Stable across platforms, which std::hash is not.
std::uint64_t fnv1a64(std::string_view bytes);

FileKey key_from_content(std::string_view content, unsigned m, const KeyHasher& hasher = fnv1a64);

/// Throws std::out_of_range if key >= 2^m.
void check_key(FileKey key, unsigned m);

/// m minus the length of the common most-significant-bit prefix of a and b.
/// Throws std::invalid_argument when the widths differ.
unsigned prefix_distance(const OverlayId& a, const OverlayId& b);

/// Same metric between a key and an identifier of width m.
unsigned prefix_distance(FileKey key, const OverlayId& id);

std::uint64_t low_mask(unsigned bits);

}  // namespace pilotmesh

template <>
struct std::hash<pilotmesh::FileKey> {
  std::size_t operator()(const pilotmesh::FileKey& k) const noexcept {
    return std::hash<std::uint64_t>{}(k.value);
  }
};
