#pragma once

#include <optional>
#include <string_view>

#include "geomet/embedding.hpp"
#include "geomet/manifold.hpp"

namespace geomet {

enum class MetaMode {
  kAvg,
  kConc,
  kGeoAvg,
  kGeoConc,
};

std::string_view to_string(MetaMode mode);
std::optional<MetaMode> meta_mode_from_string(std::string_view s);

/// Transforms mapping each source into the learned latent space: column i of
/// the first source becomes s * u_map * x_i, the second s * v_map * z_i.
struct LatentMap {
  Matrix s;      // B^{1/2}
  Matrix u_map;  // U
  Matrix v_map;  // V
};

LatentMap make_latent_map(const ProductPoint& p);

/// Meta-embedding table for the pair's shared vocabulary, in its word order.
/// AVG/CONC combine raw columns; the geometry-aware modes combine latent-space
/// columns and require `map`. AVG modes keep dimension d, CONC modes stack to
/// 2d.
EmbeddingTable build_meta(const AlignedPair& pair,
                          const std::optional<LatentMap>& map, MetaMode mode);

}  // namespace geomet
