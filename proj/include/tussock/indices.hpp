#pragma once

#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "tussock/compositing.hpp"
#include "tussock/expression.hpp"
#include "tussock/raster.hpp"

namespace tussock {

struct IndexDefinition {
    enum class Kind { Formula, NeighborhoodStddev };

    std::string id;    // "ID1".."ID9", "RGB01".."RGB14"
    std::string name;  // "NDVI"
    Kind kind = Kind::Formula;
    // Formula kind: the formula itself. Stddev kind: the formula of the
    // source index the statistic is taken over.
    Expression expression;
    std::map<std::string, double> parameters;
    std::vector<BandId> required_bands;  // sorted by band order
    std::string source_id;               // stddev kind only
    int window_radius = 1;               // stddev kind only
    bool normalized = false;             // bounded in [-1, 1] for non-negative inputs
    std::string reference;
    std::string note;

    const std::string& formula() const noexcept { return expression.source(); }
};

// ID1-ID9 plus the RGB suite, loaded from the indices configuration.
class IndexRegistry {
public:
    static IndexRegistry from_json(std::string_view text);
    // Registry compiled from config/indices.json at build time.
    static const IndexRegistry& builtin();

    const std::vector<IndexDefinition>& vegetation() const noexcept { return vegetation_; }
    const std::vector<IndexDefinition>& rgb_suite() const noexcept { return rgb_suite_; }
    const IndexDefinition& find(std::string_view id) const;
    bool contains(std::string_view id) const noexcept;

    // Fixed-width audit table: id, name, bands, parameters, formula.
    std::string table() const;

private:
    std::vector<IndexDefinition> vegetation_;
    std::vector<IndexDefinition> rgb_suite_;
};

// Pointwise value of a formula index. band_values is indexed by band_slot()
// with NaN for missing inputs; the result is NaN when undefined.
double evaluate_index(const IndexDefinition& def, std::span<const double> band_values);

BandRaster compute_index(const IndexDefinition& def, const SeasonalComposite& composite);

// Population standard deviation over the (2r+1)^2 neighbourhood, skipping
// nodata; edge pixels use the in-bounds part of the window. Nodata centres
// stay nodata.
BandRaster ndvi_stddev(const BandRaster& ndvi, int window_radius);

std::vector<BandRaster> rgb_index_suite(const SeasonalComposite& composite,
                                        const IndexRegistry& registry = IndexRegistry::builtin());

}  // namespace tussock
