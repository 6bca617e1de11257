#include "tussock/scene_io.hpp"

#include <bit>
#include <charconv>
#include <cstring>
#include <fstream>
#include <map>
#include <sstream>

#include <json.hpp>

#include "tussock/errors.hpp"

namespace tussock {

namespace {

using nlohmann::json;

void append_f32_le(std::string& out, float v) {
    auto bits = std::bit_cast<std::uint32_t>(v);
    char bytes[4];
    for (int i = 0; i < 4; ++i) bytes[i] = static_cast<char>((bits >> (8 * i)) & 0xFFu);
    out.append(bytes, 4);
}

float load_f32_le(const unsigned char* p) {
    std::uint32_t bits = 0;
    for (int i = 0; i < 4; ++i) bits |= static_cast<std::uint32_t>(p[i]) << (8 * i);
    return std::bit_cast<float>(bits);
}

std::string trim(std::string_view s) {
    std::size_t b = 0, e = s.size();
    while (b < e && (s[b] == ' ' || s[b] == '\t' || s[b] == '\r')) ++b;
    while (e > b && (s[e - 1] == ' ' || s[e - 1] == '\t' || s[e - 1] == '\r')) --e;
    return std::string(s.substr(b, e - b));
}

std::vector<std::string> split_csv(std::string_view line) {
    std::vector<std::string> out;
    std::size_t start = 0;
    for (;;) {
        auto pos = line.find(',', start);
        out.push_back(trim(line.substr(start, pos == std::string_view::npos ? pos : pos - start)));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return out;
}

template <typename T>
bool parse_number(const std::string& text, T& out) {
    const char* first = text.data();
    const char* last = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(first, last, out);
    return ec == std::errc() && ptr == last && !text.empty();
}

template <typename T>
T header_field(const json& header, const char* key, std::string_view source) {
    if (!header.contains(key))
        raise(ErrorCode::Parse, std::string(source) + ": header missing field '" + key + "'");
    try {
        return header.at(key).get<T>();
    } catch (const json::exception&) {
        raise(ErrorCode::Parse, std::string(source) + ": header field '" + key + "' has wrong type");
    }
}

}  // namespace

std::string encode_scene(const SceneStack& stack) {
    const GridSpec& g = stack.grid();
    const std::size_t band_bytes = g.size() * 4;
    json bands = json::array();
    json masks = json::array();
    std::size_t offset = 0;
    for (const auto& o : stack.observations()) {
        bands.push_back({{"band", std::string(band_name(o.band))}, {"date", o.date}, {"offset", offset}});
        offset += band_bytes;
    }
    for (const auto& m : stack.masks()) {
        masks.push_back({{"date", m.date}, {"offset", offset}});
        offset += g.size();
    }
    json header = {{"magic", "STCK1"},         {"width", g.width},
                   {"height", g.height},       {"origin_x", g.origin_x},
                   {"origin_y", g.origin_y},   {"pixel_size", g.pixel_size},
                   {"nodata", stack.nodata()}, {"bands", bands},
                   {"masks", masks}};
    std::string out = header.dump();
    out.push_back('\n');
    out.reserve(out.size() + offset);
    for (const auto& o : stack.observations())
        for (double v : o.raster.values()) append_f32_le(out, static_cast<float>(v));
    for (const auto& m : stack.masks())
        out.append(reinterpret_cast<const char*>(m.valid.data()), m.valid.size());
    return out;
}

SceneStack decode_scene(std::string_view bytes, std::string_view source) {
    const std::string src(source);
    const auto newline = bytes.find('\n');
    if (newline == std::string_view::npos)
        raise(ErrorCode::Parse, src + ": missing STCK1 header terminator");
    json header;
    try {
        header = json::parse(bytes.substr(0, newline));
    } catch (const json::exception& e) {
        raise(ErrorCode::Parse, src + ": malformed header: " + e.what());
    }
    if (!header.is_object() || header.value("magic", "") != "STCK1")
        raise(ErrorCode::Parse, src + ": not an STCK1 scene (bad magic)");

    GridSpec grid;
    grid.width = header_field<int>(header, "width", source);
    grid.height = header_field<int>(header, "height", source);
    grid.origin_x = header_field<double>(header, "origin_x", source);
    grid.origin_y = header_field<double>(header, "origin_y", source);
    grid.pixel_size = header_field<double>(header, "pixel_size", source);
    const double nodata = header_field<double>(header, "nodata", source);
    if (grid.width <= 0 || grid.height <= 0 || !(grid.pixel_size > 0.0))
        raise(ErrorCode::Parse, src + ": invalid grid in header");
    const json bands = header_field<json>(header, "bands", source);
    const json masks = header.contains("masks") ? header.at("masks") : json::array();
    if (!bands.is_array() || !masks.is_array())
        raise(ErrorCode::Parse, src + ": 'bands' and 'masks' must be arrays");

    const auto* payload = reinterpret_cast<const unsigned char*>(bytes.data() + newline + 1);
    const std::size_t payload_size = bytes.size() - newline - 1;
    const std::size_t n = grid.size();

    SceneStack stack(grid, nodata);
    for (const auto& entry : bands) {
        const auto name = entry.value("band", "");
        const auto date = entry.value("date", "");
        const std::string where = src + ": band " + name + " date " + date;
        const auto band = parse_band(name);
        if (!band || !is_input_band(*band)) raise(ErrorCode::Parse, where + ": unknown band");
        if (date.empty() || !entry.contains("offset") || !entry.at("offset").is_number_unsigned())
            raise(ErrorCode::Parse, where + ": entry needs date and offset");
        const auto offset = entry.at("offset").get<std::size_t>();
        if (offset > payload_size || payload_size - offset < n * 4)
            raise(ErrorCode::Parse, where + ": truncated payload");
        std::vector<double> values(n);
        for (std::size_t i = 0; i < n; ++i) values[i] = load_f32_le(payload + offset + 4 * i);
        try {
            stack.add_observation(*band, date, BandRaster(grid, std::move(values), nodata));
        } catch (const Error& e) {
            raise(ErrorCode::Parse, where + ": " + e.what());
        }
    }
    for (const auto& entry : masks) {
        const auto date = entry.value("date", "");
        const std::string where = src + ": mask date " + date;
        if (date.empty() || !entry.contains("offset") || !entry.at("offset").is_number_unsigned())
            raise(ErrorCode::Parse, where + ": entry needs date and offset");
        const auto offset = entry.at("offset").get<std::size_t>();
        if (offset > payload_size || payload_size - offset < n)
            raise(ErrorCode::Parse, where + ": truncated payload");
        std::vector<std::uint8_t> valid(payload + offset, payload + offset + n);
        for (auto v : valid)
            if (v > 1) raise(ErrorCode::Parse, where + ": mask values must be 0 or 1");
        try {
            stack.add_mask(date, std::move(valid));
        } catch (const Error& e) {
            raise(ErrorCode::Parse, where + ": " + e.what());
        }
    }
    return stack;
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) raise(ErrorCode::Io, "cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::filesystem::path& path, std::string_view bytes) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) raise(ErrorCode::Io, "cannot write " + path.string());
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) raise(ErrorCode::Io, "short write to " + path.string());
}

SceneStack read_scene(const std::filesystem::path& path) {
    return decode_scene(read_file(path), path.string());
}

void write_scene(const SceneStack& stack, const std::filesystem::path& path) {
    write_file(path, encode_scene(stack));
}

std::vector<PlotObservation> parse_plots(std::istream& in, std::string_view source) {
    const std::string src(source);
    std::string line;
    if (!std::getline(in, line)) raise(ErrorCode::Parse, src + ": empty plots file (no header)");
    const auto header = split_csv(line);
    std::map<std::string, std::size_t> col;
    for (std::size_t i = 0; i < header.size(); ++i) col[header[i]] = i;
    for (const char* required : {"plot_id", "x", "y", "survey_year"})
        if (!col.count(required))
            raise(ErrorCode::Parse, src + ": missing column '" + required + "'");
    const bool has_percent = col.count("cover_percent") > 0;
    const bool has_class = col.count("cover_class") > 0;
    if (!has_percent && !has_class)
        raise(ErrorCode::Parse, src + ": missing column 'cover_percent' or 'cover_class'");

    std::vector<PlotObservation> plots;
    std::size_t row = 1;
    while (std::getline(in, line)) {
        ++row;
        if (trim(line).empty()) continue;
        const auto fields = split_csv(line);
        const std::string where = src + " row " + std::to_string(row);
        if (fields.size() != header.size())
            raise(ErrorCode::Parse, where + ": expected " + std::to_string(header.size()) +
                                        " fields, found " + std::to_string(fields.size()));
        PlotObservation p;
        p.plot_id = fields[col["plot_id"]];
        if (p.plot_id.empty()) raise(ErrorCode::Parse, where + ": empty plot_id");
        if (!parse_number(fields[col["x"]], p.x))
            raise(ErrorCode::Parse, where + ": unparsable x '" + fields[col["x"]] + "'");
        if (!parse_number(fields[col["y"]], p.y))
            raise(ErrorCode::Parse, where + ": unparsable y '" + fields[col["y"]] + "'");
        if (!parse_number(fields[col["survey_year"]], p.survey_year))
            raise(ErrorCode::Parse,
                  where + ": unparsable survey_year '" + fields[col["survey_year"]] + "'");
        std::optional<CoverClass> stated;
        if (has_class && !fields[col["cover_class"]].empty()) {
            stated = parse_cover_class(fields[col["cover_class"]]);
            if (!stated)
                raise(ErrorCode::Parse,
                      where + ": unknown cover_class '" + fields[col["cover_class"]] + "'");
        }
        if (has_percent && !fields[col["cover_percent"]].empty()) {
            int pct = 0;
            if (!parse_number(fields[col["cover_percent"]], pct) || pct < 0 || pct > 100)
                raise(ErrorCode::Parse,
                      where + ": invalid cover_percent '" + fields[col["cover_percent"]] + "'");
            p.cover_percent = pct;
            p.cover_class = classify_cover(pct);
            if (stated && *stated != p.cover_class)
                raise(ErrorCode::Parse, where + ": cover_class disagrees with cover_percent");
        } else if (stated) {
            p.cover_class = *stated;
        } else {
            raise(ErrorCode::Parse, where + ": no cover value");
        }
        plots.push_back(std::move(p));
    }
    return plots;
}

std::vector<PlotObservation> read_plots(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) raise(ErrorCode::Io, "cannot open " + path.string());
    return parse_plots(in, path.string());
}

void write_plots(const std::vector<PlotObservation>& plots, const std::filesystem::path& path) {
    const bool all_percent =
        std::all_of(plots.begin(), plots.end(), [](const auto& p) { return p.cover_percent.has_value(); });
    std::ostringstream out;
    out.precision(17);
    out << "plot_id,x,y," << (all_percent ? "cover_percent" : "cover_class") << ",survey_year\n";
    for (const auto& p : plots) {
        out << p.plot_id << ',' << p.x << ',' << p.y << ',';
        if (all_percent)
            out << *p.cover_percent;
        else
            out << cover_class_name(p.cover_class);
        out << ',' << p.survey_year << '\n';
    }
    write_file(path, out.str());
}

}  // namespace tussock
