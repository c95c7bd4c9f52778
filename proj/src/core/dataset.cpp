#include "dataset.hpp"

#include <charconv>
#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "rng.hpp"

namespace tbnpb {

int TrainSet::command_dim() const {
  for (const auto& g : groups)
    if (!g.commands_deg.empty())
      return static_cast<int>(g.commands_deg.front().size());
  return 0;
}

std::size_t TrainSet::total_samples() const {
  std::size_t n = 0;
  for (const auto& g : groups) n += g.size();
  return n;
}

void TrainSet::validate() const {
  require(!groups.empty(), ErrorCode::invalid_argument, "dataset has no groups");
  const int dim = command_dim();
  std::set<std::uint32_t> ids;
  for (const auto& g : groups) {
    require(ids.insert(g.grasp_id).second, ErrorCode::invalid_argument,
            "duplicate grasp_id " + std::to_string(g.grasp_id));
    require(g.commands_deg.size() == g.tips_mm.size(),
            ErrorCode::dimension_mismatch,
            "command/tip count mismatch in grasp " + std::to_string(g.grasp_id));
    for (const auto& u : g.commands_deg)
      require(static_cast<int>(u.size()) == dim, ErrorCode::dimension_mismatch,
              "inconsistent command dimension in grasp " +
                  std::to_string(g.grasp_id));
  }
}

TrainSet collect_sim(const ArmModel& arm, const ToolModel& tool,
                     const std::vector<GraspTruth>& grasp_grid, int n_per_grasp,
                     std::uint64_t seed, int latent_dim) {
  require(!grasp_grid.empty(), ErrorCode::invalid_argument,
          "grasp grid is empty");
  require(n_per_grasp >= 1, ErrorCode::invalid_argument,
          "n_per_grasp must be >= 1");
  TrainSet set;
  for (std::size_t k = 0; k < grasp_grid.size(); ++k) {
    GraspGroup group;
    group.grasp_id = static_cast<std::uint32_t>(k);
    group.grasp = grasp_grid[k];
    group.latent = Eigen::VectorXd::Zero(latent_dim);
    group.commands_deg = sample_commands(arm, n_per_grasp, mix_seed(seed, k));
    group.tips_mm.reserve(group.commands_deg.size());
    for (const auto& u : group.commands_deg)
      group.tips_mm.push_back(tool_tip(arm, u, grasp_grid[k], tool));
    set.groups.push_back(std::move(group));
  }
  return set;
}

void save_csv(const TrainSet& set, const std::string& path) {
  set.validate();
  const int dim = set.command_dim();
  std::ofstream f(path, std::ios::trunc);
  require(f.good(), ErrorCode::io_failure, "cannot open " + path + " for writing");
  f << "grasp_id";
  for (int i = 1; i <= dim; ++i) f << ",u_" << i;
  f << ",x,y,z\n";
  char buf[40];
  for (const auto& g : set.groups) {
    for (std::size_t s = 0; s < g.size(); ++s) {
      f << g.grasp_id;
      for (int i = 0; i < dim; ++i) {
        std::snprintf(buf, sizeof(buf), "%.17g", g.commands_deg[s][i]);
        f << ',' << buf;
      }
      for (int i = 0; i < 3; ++i) {
        std::snprintf(buf, sizeof(buf), "%.17g", g.tips_mm[s][i]);
        f << ',' << buf;
      }
      f << '\n';
    }
  }
  f.close();
  require(f.good(), ErrorCode::io_failure, "failed writing " + path);
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      fields.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  fields.push_back(cur);
  return fields;
}

double parse_double(const std::string& s, const std::string& path, int line_no) {
  double v = 0;
  const auto* begin = s.data();
  const auto* end = s.data() + s.size();
  const auto res = std::from_chars(begin, end, v);
  require(res.ec == std::errc() && res.ptr == end, ErrorCode::parse_failure,
          path + ":" + std::to_string(line_no) + ": bad numeric field '" + s + "'");
  return v;
}

}  // namespace

TrainSet load_csv(const std::string& path) {
  std::ifstream f(path);
  require(f.good(), ErrorCode::io_failure, "cannot open " + path);

  std::string line;
  require(static_cast<bool>(std::getline(f, line)), ErrorCode::parse_failure,
          path + ": empty file");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  const auto header = split_csv_line(line);
  require(header.size() >= 5 && header.front() == "grasp_id",
          ErrorCode::parse_failure, path + ":1: bad header");
  const int dim = static_cast<int>(header.size()) - 4;
  for (int i = 0; i < dim; ++i)
    require(header[static_cast<std::size_t>(i) + 1] == "u_" + std::to_string(i + 1),
            ErrorCode::parse_failure, path + ":1: bad header");
  require(header[header.size() - 3] == "x" && header[header.size() - 2] == "y" &&
              header.back() == "z",
          ErrorCode::parse_failure, path + ":1: bad header");

  TrainSet set;
  std::vector<std::size_t> index_by_id;  // grasp_id -> group index + 1
  int line_no = 1;
  while (std::getline(f, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto fields = split_csv_line(line);
    require(fields.size() == header.size(), ErrorCode::parse_failure,
            path + ":" + std::to_string(line_no) + ": expected " +
                std::to_string(header.size()) + " columns, got " +
                std::to_string(fields.size()));
    const double id_val = parse_double(fields[0], path, line_no);
    require(id_val >= 0 && id_val < 1e6 && id_val == std::floor(id_val),
            ErrorCode::parse_failure,
            path + ":" + std::to_string(line_no) + ": bad grasp_id");
    const auto id = static_cast<std::uint32_t>(id_val);

    if (index_by_id.size() <= id) index_by_id.resize(id + 1, 0);
    if (index_by_id[id] == 0) {
      GraspGroup group;
      group.grasp_id = id;
      set.groups.push_back(std::move(group));
      index_by_id[id] = set.groups.size();
    }
    GraspGroup& group = set.groups[index_by_id[id] - 1];

    Eigen::VectorXd u(dim);
    for (int i = 0; i < dim; ++i)
      u[i] = parse_double(fields[static_cast<std::size_t>(i) + 1], path, line_no);
    Eigen::Vector3d tip;
    for (int i = 0; i < 3; ++i)
      tip[i] = parse_double(fields[fields.size() - 3 + i], path, line_no);
    group.commands_deg.push_back(std::move(u));
    group.tips_mm.push_back(tip);
  }
  require(!set.groups.empty(), ErrorCode::parse_failure, path + ": no data rows");
  set.validate();
  return set;
}

}  // namespace tbnpb
