#pragma once

#include <filesystem>
#include <istream>
#include <string>
#include <string_view>
#include <vector>

#include "tussock/raster.hpp"

namespace tussock {

// STCK1 scene container: one line of JSON header, then the raw payload.
//
//   {"magic":"STCK1","width":W,"height":H,"origin_x":..,"origin_y":..,
//    "pixel_size":..,"nodata":..,
//    "bands":[{"band":"B4","date":"2021-09-14","offset":0},...],
//    "masks":[{"date":"2021-09-14","offset":...},...]}\n
//   <payload>
//
// Offsets are byte offsets from the first payload byte. Band payloads are
// row-major little-endian float32, masks row-major uint8 in {0,1}. Values are
// narrowed to float32 on write, so the round trip is bit-exact for any scene
// whose values are float32-representable.
std::string encode_scene(const SceneStack& stack);
SceneStack decode_scene(std::string_view bytes, std::string_view source = "<memory>");

SceneStack read_scene(const std::filesystem::path& path);
void write_scene(const SceneStack& stack, const std::filesystem::path& path);

// Plot CSV with header plot_id,x,y,cover_percent,survey_year (cover_class
// with None/Low/Medium/High may replace cover_percent).
std::vector<PlotObservation> parse_plots(std::istream& in, std::string_view source = "<stream>");
std::vector<PlotObservation> read_plots(const std::filesystem::path& path);
void write_plots(const std::vector<PlotObservation>& plots, const std::filesystem::path& path);

// Whole-file helpers shared by the readers and writers.
std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view bytes);

}  // namespace tussock
