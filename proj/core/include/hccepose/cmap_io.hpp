#pragma once

#include <iosfwd>
#include <string>

#include "hccepose/coordinate_map.hpp"
#include "hccepose/correspondence.hpp"

namespace hcce {

/// CMAP binary format, little-endian:
///   magic "CMAP", version u32 = 1, width u32, height u32,
///   height*width mask bytes (row-major),
///   height*width*3 front coordinates (f32),
///   height*width*3 back coordinates (f32).
/// Unmasked pixels store quiet NaN coordinates. Loading a saved map and
/// saving it again reproduces the bytes exactly.
void save_coordinate_map(const CoordinateMap& map, std::ostream& out);
void save_coordinate_map(const CoordinateMap& map, const std::string& path);
CoordinateMap load_coordinate_map(std::istream& in);
CoordinateMap load_coordinate_map(const std::string& path);

/// CSET binary format, little-endian:
///   magic "CSET", version u32 = 1, record count u64, d_bar f64, then per
///   record: group u32, source u8, pixel f64 x2, point f64 x3.
void save_correspondence_set(const CorrespondenceSet& set, std::ostream& out);
void save_correspondence_set(const CorrespondenceSet& set, const std::string& path);
CorrespondenceSet load_correspondence_set(std::istream& in);
CorrespondenceSet load_correspondence_set(const std::string& path);

}  // namespace hcce
