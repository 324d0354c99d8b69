#include "macdp/io.hpp"

#include <charconv>
#include <istream>
#include <ostream>
#include <sstream>
#include <vector>

#include "macdp/errors.hpp"

namespace macdp {

namespace {

int parse_small_int(const std::string& text, const char* what) {
  int v = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw ValidationError(std::string("bad ") + what + ": '" + text + "'");
  }
  return v;
}

void write_index(std::ostream& os, const CommonIndex& x) {
  os << to_token(x.k) << ',' << to_token(x.l) << ',' << x.channel.s << ',' << x.channel.m;
}

}  // namespace

std::string to_token(BufferIndex b) { return b.is_infinite() ? "inf" : std::to_string(b.k()); }

BufferIndex parse_buffer_index(const std::string& text) {
  if (text == "inf") return BufferIndex::infinity();
  const int k = parse_small_int(text, "buffer index");
  if (k < 1) throw ValidationError("buffer index must be >= 1");
  return BufferIndex::finite(k);
}

void write_centralized_policy_csv(std::ostream& os, const CentralizedSolution& sol) {
  os << "n,s,m,action,value\n";
  os.precision(17);
  for (StateId id = 0; id < sol.layout.size(); ++id) {
    const auto x = sol.layout.state(id);
    os << x.n << ',' << x.channel.s << ',' << x.channel.m << ',' << sol.policy[id] << ',' << sol.vi.values[id] << '\n';
  }
}

void write_coordinated_policy_csv(std::ostream& os, const CoordinatedSolution& sol) {
  os << "k,l,s,m,d1,d2,value\n";
  os.precision(17);
  for (StateId id = 0; id < sol.layout.size(); ++id) {
    const auto d = prescription_of(sol.policy[id]);
    write_index(os, sol.layout.state(id));
    os << ',' << d.d1 << ',' << d.d2 << ',' << sol.vi.values[id] << '\n';
  }
}

void write_strategy_csv(std::ostream& os, const DeviceStrategy& strategy) {
  os << "k,l,s,m,d\n";
  const auto& layout = strategy.layout();
  for (StateId id = 0; id < layout.size(); ++id) {
    write_index(os, layout.state(id));
    os << ',' << strategy.at(id) << '\n';
  }
}

DeviceStrategy read_strategy_csv(std::istream& is, const CoordinatedLayout& layout) {
  std::vector<int> bits(layout.size(), -1);
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#' || line == "k,l,s,m,d") continue;
    std::vector<std::string> f;
    std::istringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) f.push_back(cell);
    const std::string where = "strategy line " + std::to_string(lineno) + ": ";
    if (f.size() != 5) throw ValidationError(where + "expected k,l,s,m,d");
    CommonIndex x;
    try {
      x.k = parse_buffer_index(f[0]);
      x.l = parse_buffer_index(f[1]);
      x.channel.s = parse_small_int(f[2], "channel state");
      x.channel.m = parse_small_int(f[3], "channel age");
    } catch (const ValidationError& e) {
      throw ValidationError(where + e.what());
    }
    const int d = parse_small_int(f[4], "bit");
    const auto in_range = [&](BufferIndex b) { return b.is_infinite() || b.k() <= layout.cap_k(); };
    if (!in_range(x.k) || !in_range(x.l) || (x.channel.s != 0 && x.channel.s != 1) || x.channel.m < 1 ||
        x.channel.m > layout.cap_m() || (d != 0 && d != 1)) {
      throw ValidationError(where + "value out of range for the caps");
    }
    auto& slot = bits[layout.id(x)];
    if (slot != -1) throw ValidationError(where + "duplicate state");
    slot = d;
  }
  std::vector<std::uint8_t> out(bits.size());
  for (std::size_t i = 0; i < bits.size(); ++i) {
    if (bits[i] < 0) throw ValidationError("strategy file does not cover every state");
    out[i] = static_cast<std::uint8_t>(bits[i]);
  }
  return {layout, std::move(out)};
}

}  // namespace macdp
