#include <fmt/format.h>

#include "mcprobe/errors.hpp"
#include "mcprobe/routes.hpp"

namespace mcprobe {

RouteTree build_route(const Topology& t, const RouteParams& params)
{
    switch (params.scheme) {
    case Scheme::unicursal: return build_unicursal(t);
    case Scheme::bbt_t1: return build_bbt(t, BbtVariant::t1, params.segment_len);
    case Scheme::bbt_t2: return build_bbt(t, BbtVariant::t2, params.segment_len);
    case Scheme::spt_m1: return build_spt(t, SptModel::m1);
    case Scheme::spt_m2: return build_spt(t, SptModel::m2);
    }
    throw ConfigError("unknown route scheme");
}

std::string route_name(const RouteParams& params)
{
    switch (params.scheme) {
    case Scheme::unicursal: return "unicursal";
    case Scheme::bbt_t1: return fmt::format("T1_seg{}", params.segment_len);
    case Scheme::bbt_t2: return fmt::format("T2_seg{}", params.segment_len);
    case Scheme::spt_m1: return "Model1";
    case Scheme::spt_m2: return "Model2";
    }
    return "unknown";
}

}  // namespace mcprobe
