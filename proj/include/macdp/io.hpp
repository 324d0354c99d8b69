#pragma once

#include <iosfwd>
#include <string>

#include "macdp/centralized.hpp"
#include "macdp/coordinated.hpp"
#include "macdp/pbp.hpp"

namespace macdp {

/// "inf" or the finite index.
std::string to_token(BufferIndex b);
BufferIndex parse_buffer_index(const std::string& text);

/// `n,s,m,action,value`
void write_centralized_policy_csv(std::ostream& os, const CentralizedSolution& sol);
/// `k,l,s,m,d1,d2,value`
void write_coordinated_policy_csv(std::ostream& os, const CoordinatedSolution& sol);
/// `k,l,s,m,d`
void write_strategy_csv(std::ostream& os, const DeviceStrategy& strategy);
/// Reads `k,l,s,m,d` rows. Every state of `layout` must appear exactly once.
DeviceStrategy read_strategy_csv(std::istream& is, const CoordinatedLayout& layout);

}  // namespace macdp
