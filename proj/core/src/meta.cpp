#include "geomet/meta.hpp"

#include "geomet/errors.hpp"

namespace geomet {

std::string_view to_string(MetaMode mode) {
  switch (mode) {
    case MetaMode::kAvg: return "avg";
    case MetaMode::kConc: return "conc";
    case MetaMode::kGeoAvg: return "geo-avg";
    case MetaMode::kGeoConc: return "geo-conc";
  }
  return "unknown";
}

std::optional<MetaMode> meta_mode_from_string(std::string_view s) {
  if (s == "avg") return MetaMode::kAvg;
  if (s == "conc") return MetaMode::kConc;
  if (s == "geo-avg") return MetaMode::kGeoAvg;
  if (s == "geo-conc") return MetaMode::kGeoConc;
  return std::nullopt;
}

LatentMap make_latent_map(const ProductPoint& p) {
  return {sqrt_spd(p.b).m(), p.u.m(), p.v.m()};
}

EmbeddingTable build_meta(const AlignedPair& pair,
                          const std::optional<LatentMap>& map, MetaMode mode) {
  const Matrix& x = pair.x().vectors();
  const Matrix& z = pair.z().vectors();
  const Index d = pair.dim();
  const bool geo = mode == MetaMode::kGeoAvg || mode == MetaMode::kGeoConc;
  if (geo && !map)
    throw std::invalid_argument("latent map required for geometry-aware modes");

  Matrix xs;
  Matrix zs;
  if (geo) {
    if (map->s.rows() != d || map->u_map.rows() != d || map->v_map.rows() != d)
      throw DataError("latent map dimension does not match embeddings");
    xs = (map->s * map->u_map) * x;
    zs = (map->s * map->v_map) * z;
  } else {
    xs = x;
    zs = z;
  }

  Matrix out;
  switch (mode) {
    case MetaMode::kAvg:
    case MetaMode::kGeoAvg:
      out = 0.5 * (xs + zs);
      break;
    case MetaMode::kConc:
    case MetaMode::kGeoConc:
      out.resize(2 * d, pair.size());
      out.topRows(d) = xs;
      out.bottomRows(d) = zs;
      break;
  }
  return EmbeddingTable(pair.words(), std::move(out));
}

}  // namespace geomet
