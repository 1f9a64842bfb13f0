#ifndef ELLIP_CATALOG_HPP
#define ELLIP_CATALOG_HPP

#include <map>
#include <string>
#include <vector>

#include "ellip/operator.hpp"

namespace ellip {

struct CatalogParams {
    std::size_t n = 2;
    std::size_t N = 3; // fiber dimension for directional_example
    std::size_t k = 1; // order for kth_gradient
};

/// Stable CLI identifiers.
std::vector<std::string> catalog_names();

/// Parameter schema line per name, for catalog-list output.
std::string catalog_schema(const std::string& name);

/// Build a catalog operator.
///
/// Symmetric-matrix-valued targets (symmetric_gradient, dev_symmetric_gradient)
/// are flattened row-wise over index pairs i <= j, each off-diagonal entry
/// stored once with weight 1.
Operator catalog(const std::string& name, const CatalogParams& params = {});

} // namespace ellip

#endif
