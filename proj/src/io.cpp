#include "sarcv/io.hpp"

#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

namespace sarcv::io {

using nlohmann::json;

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  require(out.good(), "cannot open for writing: " + path.string());
  out << text;
  require(out.good(), "write failed: " + path.string());
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  require(in.good(), "cannot open for reading: " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// ---------------------------------------------------------------------------
// JSON configuration
// ---------------------------------------------------------------------------

namespace {

void check_keys(const json& j, const std::string& where, std::set<std::string> allowed) {
  require(j.is_object(), "config: '" + where + "' must be an object");
  for (const auto& item : j.items()) {
    require(allowed.count(item.key()) > 0, "config: unknown key '" + item.key() + "' in " + where);
  }
}

double get_num(const json& j, const std::string& where, const char* key, double fallback) {
  if (!j.contains(key)) return fallback;
  require(j[key].is_number(), "config: '" + where + "." + key + "' must be a number");
  return j[key].get<double>();
}

std::int64_t get_int(const json& j, const std::string& where, const char* key, std::int64_t fallback) {
  if (!j.contains(key)) return fallback;
  require(j[key].is_number_integer(), "config: '" + where + "." + key + "' must be an integer");
  return j[key].get<std::int64_t>();
}

bool get_bool(const json& j, const std::string& where, const char* key, bool fallback) {
  if (!j.contains(key)) return fallback;
  require(j[key].is_boolean(), "config: '" + where + "." + key + "' must be a boolean");
  return j[key].get<bool>();
}

std::string get_str(const json& j, const std::string& where, const char* key,
                    const std::string& fallback) {
  if (!j.contains(key)) return fallback;
  require(j[key].is_string(), "config: '" + where + "." + key + "' must be a string");
  return j[key].get<std::string>();
}

std::vector<double> get_num_list(const json& j, const std::string& where, const char* key) {
  std::vector<double> out;
  if (!j.contains(key)) return out;
  require(j[key].is_array(), "config: '" + where + "." + key + "' must be an array");
  for (const auto& v : j[key]) {
    require(v.is_number(), "config: '" + where + "." + key + "' must hold numbers");
    out.push_back(v.get<double>());
  }
  return out;
}

MatrixSpec parse_matrix_spec(const json& j, const std::string& where) {
  check_keys(j, where, {"kind", "scale", "diagonal", "rows"});
  MatrixSpec spec;
  const std::string kind = get_str(j, where, "kind", "identity");
  if (kind == "identity") {
    spec.kind = MatrixSpec::Kind::Identity;
  } else if (kind == "scaled_identity") {
    spec.kind = MatrixSpec::Kind::ScaledIdentity;
  } else if (kind == "diagonal") {
    spec.kind = MatrixSpec::Kind::Diagonal;
  } else if (kind == "tridiag_skew_unit") {
    spec.kind = MatrixSpec::Kind::TridiagSkewUnit;
  } else if (kind == "explicit") {
    spec.kind = MatrixSpec::Kind::Explicit;
  } else {
    throw std::invalid_argument("config: unknown matrix kind '" + kind + "' in " + where);
  }
  spec.scale = get_num(j, where, "scale", 1.0);
  spec.diagonal = get_num_list(j, where, "diagonal");
  if (j.contains("rows")) {
    require(j["rows"].is_array(), "config: '" + where + ".rows' must be an array of arrays");
    for (const auto& row : j["rows"]) {
      require(row.is_array(), "config: '" + where + ".rows' must be an array of arrays");
      std::vector<double> r;
      for (const auto& v : row) {
        require(v.is_number(), "config: '" + where + ".rows' must hold numbers");
        r.push_back(v.get<double>());
      }
      spec.rows.push_back(std::move(r));
    }
  }
  return spec;
}

BumpSpec parse_bump(const json& j, const std::string& where) {
  check_keys(j, where, {"amplitude", "center", "width"});
  BumpSpec b;
  b.amplitude = get_num(j, where, "amplitude", 1.0);
  b.center = get_num(j, where, "center", 1.0);
  b.width = get_num(j, where, "width", 0.5);
  require(b.width > 0.0, "config: " + where + ".width must be positive");
  return b;
}

const char* matrix_kind_name(MatrixSpec::Kind k) {
  switch (k) {
    case MatrixSpec::Kind::Identity: return "identity";
    case MatrixSpec::Kind::ScaledIdentity: return "scaled_identity";
    case MatrixSpec::Kind::Diagonal: return "diagonal";
    case MatrixSpec::Kind::TridiagSkewUnit: return "tridiag_skew_unit";
    case MatrixSpec::Kind::Explicit: return "explicit";
  }
  return "?";
}

json matrix_spec_json(const MatrixSpec& spec) {
  json j;
  j["kind"] = matrix_kind_name(spec.kind);
  j["scale"] = spec.scale;
  if (!spec.diagonal.empty()) j["diagonal"] = spec.diagonal;
  if (!spec.rows.empty()) j["rows"] = spec.rows;
  return j;
}

json bump_json(const BumpSpec& b) {
  return json{{"amplitude", b.amplitude}, {"center", b.center}, {"width", b.width}};
}

}  // namespace

CliConfig parse_config_text(const std::string& text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument(std::string("config: JSON parse error: ") + e.what());
  }
  check_keys(root, "top level",
             {"dim", "T", "q", "semigroup", "space", "vol", "hjm_drift", "h0", "n_list",
              "replications", "refine", "seed", "bn_subgrid", "bn_max_nodes", "bn_replications",
              "alpha_rate", "slope_band", "threads", "deltas", "n"});

  CliConfig cfg;
  StudyConfig& s = cfg.study;
  s.dim = get_int(root, "top level", "dim", s.dim);
  require(s.dim >= 1, "config: dim must be positive");
  s.t_max = get_num(root, "top level", "T", s.t_max);
  require(s.t_max > 0.0, "config: T must be positive");

  if (root.contains("q")) {
    const json& q = root["q"];
    check_keys(q, "q", {"kind", "ratio", "first", "rank", "values"});
    const std::string kind = get_str(q, "q", "kind", "geometric");
    if (kind == "geometric") {
      s.q.kind = QConfig::Kind::Geometric;
    } else if (kind == "explicit") {
      s.q.kind = QConfig::Kind::ExplicitList;
    } else if (kind == "unit") {
      s.q.kind = QConfig::Kind::Unit;
    } else {
      throw std::invalid_argument("config: unknown q.kind '" + kind + "'");
    }
    s.q.ratio = get_num(q, "q", "ratio", s.q.ratio);
    s.q.first = get_num(q, "q", "first", s.q.first);
    s.q.rank = get_int(q, "q", "rank", s.q.rank);
    s.q.values = get_num_list(q, "q", "values");
  }

  if (root.contains("semigroup")) {
    const json& g = root["semigroup"];
    check_keys(g, "semigroup", {"kind", "generator"});
    const std::string kind = get_str(g, "semigroup", "kind", "identity");
    if (kind == "identity") {
      s.semigroup.kind = SemigroupConfig::Kind::Identity;
    } else if (kind == "matrix_exp") {
      s.semigroup.kind = SemigroupConfig::Kind::MatrixExp;
    } else if (kind == "shift") {
      s.semigroup.kind = SemigroupConfig::Kind::Shift;
    } else {
      throw std::invalid_argument("config: unknown semigroup.kind '" + kind + "'");
    }
    if (g.contains("generator")) s.semigroup.generator = parse_matrix_spec(g["generator"], "semigroup.generator");
  }

  if (root.contains("space")) {
    const json& sp = root["space"];
    check_keys(sp, "space", {"beta", "x_max", "cells"});
    s.space.beta = get_num(sp, "space", "beta", s.space.beta);
    s.space.x_max = get_num(sp, "space", "x_max", s.space.x_max);
    s.space.cells = get_int(sp, "space", "cells", s.space.cells);
    require(s.space.beta > 0.0 && s.space.x_max > 0.0 && s.space.cells >= 2,
            "config: space requires beta > 0, x_max > 0, cells >= 2");
  }

  if (root.contains("vol")) {
    const json& v = root["vol"];
    check_keys(v, "vol",
               {"kind", "sigma", "kappa", "sigma0", "rate", "jump_scale", "alpha", "amplitudes",
                "c", "f", "p", "f_csv", "p_csv", "mode_amplitudes", "mode_centers", "mode_width"});
    const std::string kind = get_str(v, "vol", "kind", "constant");
    if (kind == "constant") {
      s.vol.kind = VolConfig::Kind::Constant;
    } else if (kind == "bns") {
      s.vol.kind = VolConfig::Kind::Bns;
    } else if (kind == "rough_exp") {
      s.vol.kind = VolConfig::Kind::RoughExp;
    } else if (kind == "forward_kernel") {
      s.vol.kind = VolConfig::Kind::ForwardKernel;
    } else if (kind == "curve_modes") {
      s.vol.kind = VolConfig::Kind::CurveModes;
    } else {
      throw std::invalid_argument("config: unknown vol.kind '" + kind + "'");
    }
    if (v.contains("sigma")) s.vol.sigma = parse_matrix_spec(v["sigma"], "vol.sigma");
    s.vol.kappa = get_num(v, "vol", "kappa", s.vol.kappa);
    if (v.contains("sigma0")) s.vol.sigma0 = parse_matrix_spec(v["sigma0"], "vol.sigma0");
    s.vol.rate = get_num(v, "vol", "rate", s.vol.rate);
    s.vol.jump_scale = get_num(v, "vol", "jump_scale", s.vol.jump_scale);
    s.vol.alpha = get_num(v, "vol", "alpha", s.vol.alpha);
    s.vol.amplitudes = get_num_list(v, "vol", "amplitudes");
    s.vol.c = get_num(v, "vol", "c", s.vol.c);
    if (v.contains("f")) s.vol.f = parse_bump(v["f"], "vol.f");
    if (v.contains("p")) s.vol.p = parse_bump(v["p"], "vol.p");
    s.vol.f_csv = get_str(v, "vol", "f_csv", s.vol.f_csv);
    s.vol.p_csv = get_str(v, "vol", "p_csv", s.vol.p_csv);
    s.vol.mode_amplitudes = get_num_list(v, "vol", "mode_amplitudes");
    s.vol.mode_centers = get_num_list(v, "vol", "mode_centers");
    s.vol.mode_width = get_num(v, "vol", "mode_width", s.vol.mode_width);
  }

  s.hjm_drift = get_bool(root, "top level", "hjm_drift", s.hjm_drift);

  if (root.contains("h0")) {
    const json& h = root["h0"];
    check_keys(h, "h0", {"kind", "level", "slope"});
    const std::string kind = get_str(h, "h0", "kind", "zero");
    if (kind == "zero") {
      s.h0.kind = H0Config::Kind::Zero;
    } else if (kind == "flat_decay") {
      s.h0.kind = H0Config::Kind::FlatDecay;
    } else {
      throw std::invalid_argument("config: unknown h0.kind '" + kind + "'");
    }
    s.h0.level = get_num(h, "h0", "level", s.h0.level);
    s.h0.slope = get_num(h, "h0", "slope", s.h0.slope);
  }

  if (root.contains("n_list")) {
    s.n_list.clear();
    for (double v : get_num_list(root, "top level", "n_list")) {
      require(v >= 1.0 && v == std::floor(v), "config: n_list entries must be positive integers");
      s.n_list.push_back(static_cast<int>(v));
    }
    require(!s.n_list.empty(), "config: n_list must be nonempty");
  }

  s.replications = static_cast<int>(get_int(root, "top level", "replications", s.replications));
  s.refine = static_cast<int>(get_int(root, "top level", "refine", s.refine));
  if (root.contains("seed")) {
    require(root["seed"].is_number_unsigned() || root["seed"].is_number_integer(),
            "config: seed must be an integer");
    s.seed = root["seed"].get<std::uint64_t>();
  }
  s.bn_subgrid = get_int(root, "top level", "bn_subgrid", s.bn_subgrid);
  s.bn_max_nodes = get_int(root, "top level", "bn_max_nodes", s.bn_max_nodes);
  s.bn_replications = static_cast<int>(get_int(root, "top level", "bn_replications", s.bn_replications));
  s.alpha_rate = get_num(root, "top level", "alpha_rate", s.alpha_rate);
  if (root.contains("slope_band")) {
    const std::vector<double> band = get_num_list(root, "top level", "slope_band");
    require(band.size() == 2 && band[0] <= band[1], "config: slope_band must be [lo, hi]");
    s.slope_band = {band[0], band[1]};
  }
  s.threads = static_cast<int>(get_int(root, "top level", "threads", s.threads));

  cfg.deltas = get_num_list(root, "top level", "deltas");
  if (cfg.deltas.empty()) {
    for (int k = 4; k <= 10; ++k) cfg.deltas.push_back(std::pow(2.0, -k));
  }
  cfg.sim_n = static_cast<int>(get_int(root, "top level", "n", cfg.sim_n));
  require(cfg.sim_n >= 1, "config: n must be positive");
  return cfg;
}

CliConfig parse_config_file(const std::filesystem::path& path) {
  return parse_config_text(read_text(path));
}

std::string resolved_config_json(const CliConfig& cfg) {
  const StudyConfig& s = cfg.study;
  json root;
  root["dim"] = s.dim;
  root["T"] = s.t_max;

  json q;
  switch (s.q.kind) {
    case QConfig::Kind::Geometric: q["kind"] = "geometric"; break;
    case QConfig::Kind::ExplicitList: q["kind"] = "explicit"; break;
    case QConfig::Kind::Unit: q["kind"] = "unit"; break;
  }
  q["ratio"] = s.q.ratio;
  q["first"] = s.q.first;
  q["rank"] = s.q.rank;
  if (!s.q.values.empty()) q["values"] = s.q.values;
  root["q"] = q;

  json g;
  switch (s.semigroup.kind) {
    case SemigroupConfig::Kind::Identity: g["kind"] = "identity"; break;
    case SemigroupConfig::Kind::MatrixExp: g["kind"] = "matrix_exp"; break;
    case SemigroupConfig::Kind::Shift: g["kind"] = "shift"; break;
  }
  g["generator"] = matrix_spec_json(s.semigroup.generator);
  root["semigroup"] = g;

  root["space"] = json{{"beta", s.space.beta}, {"x_max", s.space.x_max}, {"cells", s.space.cells}};

  json v;
  switch (s.vol.kind) {
    case VolConfig::Kind::Constant: v["kind"] = "constant"; break;
    case VolConfig::Kind::Bns: v["kind"] = "bns"; break;
    case VolConfig::Kind::RoughExp: v["kind"] = "rough_exp"; break;
    case VolConfig::Kind::ForwardKernel: v["kind"] = "forward_kernel"; break;
    case VolConfig::Kind::CurveModes: v["kind"] = "curve_modes"; break;
  }
  v["sigma"] = matrix_spec_json(s.vol.sigma);
  v["kappa"] = s.vol.kappa;
  v["sigma0"] = matrix_spec_json(s.vol.sigma0);
  v["rate"] = s.vol.rate;
  v["jump_scale"] = s.vol.jump_scale;
  v["alpha"] = s.vol.alpha;
  if (!s.vol.amplitudes.empty()) v["amplitudes"] = s.vol.amplitudes;
  v["c"] = s.vol.c;
  v["f"] = bump_json(s.vol.f);
  v["p"] = bump_json(s.vol.p);
  if (!s.vol.f_csv.empty()) v["f_csv"] = s.vol.f_csv;
  if (!s.vol.p_csv.empty()) v["p_csv"] = s.vol.p_csv;
  if (!s.vol.mode_amplitudes.empty()) v["mode_amplitudes"] = s.vol.mode_amplitudes;
  if (!s.vol.mode_centers.empty()) v["mode_centers"] = s.vol.mode_centers;
  v["mode_width"] = s.vol.mode_width;
  root["vol"] = v;

  root["hjm_drift"] = s.hjm_drift;
  json h;
  h["kind"] = s.h0.kind == H0Config::Kind::Zero ? "zero" : "flat_decay";
  h["level"] = s.h0.level;
  h["slope"] = s.h0.slope;
  root["h0"] = h;

  root["n_list"] = s.n_list;
  root["replications"] = s.replications;
  root["refine"] = s.refine;
  root["seed"] = s.seed;
  root["bn_subgrid"] = s.bn_subgrid;
  root["bn_max_nodes"] = s.bn_max_nodes;
  root["bn_replications"] = s.bn_replications;
  root["alpha_rate"] = s.alpha_rate;
  root["slope_band"] = {s.slope_band[0], s.slope_band[1]};
  // threads deliberately omitted: it only affects wall time, never results
  root["deltas"] = cfg.deltas;
  root["n"] = cfg.sim_n;
  return root.dump(2);
}

// ---------------------------------------------------------------------------
// CSV
// ---------------------------------------------------------------------------

void write_trajectory_csv(const std::filesystem::path& path, const Trajectory& traj) {
  const Index d = traj.states.rows();
  const Index n = traj.obs_times.size();
  std::ostringstream out;
  out << "# trajectory d=" << d << " delta_n=" << format_double(traj.delta_n)
      << " T=" << format_double(traj.obs_times(n - 1)) << " R=" << traj.refine
      << " seed=" << traj.seed << "\n";
  out << "t";
  for (Index k = 0; k < d; ++k) out << ",y" << k;
  out << "\n";
  for (Index i = 0; i < n; ++i) {
    out << format_double(traj.obs_times(i));
    for (Index k = 0; k < d; ++k) out << "," << format_double(traj.states(k, i));
    out << "\n";
  }
  write_text(path, out.str());
}

Trajectory read_trajectory_csv(const std::filesystem::path& path) {
  std::istringstream in(read_text(path));
  std::string line;
  require(static_cast<bool>(std::getline(in, line)), "trajectory CSV: empty file");
  long long d = 0, refine = 0;
  unsigned long long seed = 0;
  double delta_n = 0.0, t_max = 0.0;
  const int got = std::sscanf(line.c_str(), "# trajectory d=%lld delta_n=%lf T=%lf R=%lld seed=%llu",
                              &d, &delta_n, &t_max, &refine, &seed);
  require(got == 5, "trajectory CSV: malformed header line");
  require(static_cast<bool>(std::getline(in, line)), "trajectory CSV: missing column header");

  std::vector<std::vector<double>> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<double> row;
    std::istringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) row.push_back(std::stod(cell));
    require(static_cast<long long>(row.size()) == d + 1, "trajectory CSV: wrong column count");
    rows.push_back(std::move(row));
  }
  require(rows.size() >= 2, "trajectory CSV: need at least two rows");

  Trajectory traj;
  traj.delta_n = delta_n;
  traj.refine = static_cast<int>(refine);
  traj.seed = seed;
  traj.obs_times.resize(static_cast<Index>(rows.size()));
  traj.states.resize(d, static_cast<Index>(rows.size()));
  for (size_t i = 0; i < rows.size(); ++i) {
    traj.obs_times(static_cast<Index>(i)) = rows[i][0];
    for (long long k = 0; k < d; ++k) {
      traj.states(k, static_cast<Index>(i)) = rows[i][static_cast<size_t>(k + 1)];
    }
  }
  return traj;
}

void write_operator_path_csv(const std::filesystem::path& path, const OperatorPath& ops) {
  require(!ops.ops.empty(), "operator path CSV: empty path");
  const Index rows = ops.ops.front().rows();
  const Index cols = ops.ops.front().cols();
  std::ostringstream out;
  out << "# operator_path rows=" << rows << " cols=" << cols << "\n";
  out << "t";
  for (Index a = 0; a < rows; ++a) {
    for (Index b = 0; b < cols; ++b) out << ",e" << a << "_" << b;
  }
  out << "\n";
  for (Index i = 0; i < ops.times.size(); ++i) {
    out << format_double(ops.times(i));
    const Matrix& m = ops.ops[static_cast<size_t>(i)];
    for (Index a = 0; a < rows; ++a) {
      for (Index b = 0; b < cols; ++b) out << "," << format_double(m(a, b));
    }
    out << "\n";
  }
  write_text(path, out.str());
}

OperatorPath read_operator_path_csv(const std::filesystem::path& path) {
  std::istringstream in(read_text(path));
  std::string line;
  require(static_cast<bool>(std::getline(in, line)), "operator path CSV: empty file");
  long long rows = 0, cols = 0;
  require(std::sscanf(line.c_str(), "# operator_path rows=%lld cols=%lld", &rows, &cols) == 2,
          "operator path CSV: malformed header line");
  require(static_cast<bool>(std::getline(in, line)), "operator path CSV: missing column header");
  OperatorPath out;
  std::vector<double> times;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<double> row;
    std::istringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) row.push_back(std::stod(cell));
    require(static_cast<long long>(row.size()) == rows * cols + 1,
            "operator path CSV: wrong column count");
    times.push_back(row[0]);
    Matrix m(rows, cols);
    size_t idx = 1;
    for (long long a = 0; a < rows; ++a) {
      for (long long b = 0; b < cols; ++b) m(a, b) = row[idx++];
    }
    out.ops.push_back(std::move(m));
  }
  out.times = Eigen::Map<const Vector>(times.data(), static_cast<Index>(times.size()));
  return out;
}

namespace {

std::vector<double> split_numbers(const std::string& line, const char* what) {
  std::vector<double> out;
  std::istringstream ls(line);
  std::string cell;
  while (std::getline(ls, cell, ',')) {
    try {
      out.push_back(std::stod(cell));
    } catch (const std::exception&) {
      throw std::invalid_argument(std::string(what) + ": non-numeric cell '" + cell + "'");
    }
  }
  return out;
}

}  // namespace

void write_grid_function_csv(const std::filesystem::path& path, const Vector& nodes,
                             const Vector& values) {
  require(nodes.size() == values.size() && nodes.size() >= 2,
          "grid function CSV: nodes and values must match");
  std::ostringstream out;
  for (Index j = 0; j < nodes.size(); ++j) {
    out << (j ? "," : "") << format_double(nodes(j));
  }
  out << "\n";
  for (Index j = 0; j < values.size(); ++j) {
    out << (j ? "," : "") << format_double(values(j));
  }
  out << "\n";
  write_text(path, out.str());
}

GridFunctionCsv read_grid_function_csv(const std::filesystem::path& path) {
  std::istringstream in(read_text(path));
  std::string header, row;
  require(static_cast<bool>(std::getline(in, header)), "grid function CSV: missing header line");
  require(static_cast<bool>(std::getline(in, row)), "grid function CSV: missing value row");
  const std::vector<double> nodes = split_numbers(header, "grid function CSV");
  const std::vector<double> values = split_numbers(row, "grid function CSV");
  require(nodes.size() == values.size() && nodes.size() >= 2,
          "grid function CSV: header and value row must have the same length");
  GridFunctionCsv out;
  out.nodes = Eigen::Map<const Vector>(nodes.data(), static_cast<Index>(nodes.size()));
  out.values = Eigen::Map<const Vector>(values.data(), static_cast<Index>(values.size()));
  return out;
}

void write_matrix_csv(const std::filesystem::path& path, const Eigen::Ref<const Matrix>& m) {
  std::ostringstream out;
  for (Index i = 0; i < m.rows(); ++i) {
    for (Index j = 0; j < m.cols(); ++j) {
      out << (j ? "," : "") << format_double(m(i, j));
    }
    out << "\n";
  }
  write_text(path, out.str());
}

Matrix read_matrix_csv(const std::filesystem::path& path) {
  std::istringstream in(read_text(path));
  std::string line;
  std::vector<std::vector<double>> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    rows.push_back(split_numbers(line, "matrix CSV"));
    require(rows.back().size() == rows.front().size(), "matrix CSV: ragged rows");
  }
  require(!rows.empty(), "matrix CSV: empty file");
  Matrix m(static_cast<Index>(rows.size()), static_cast<Index>(rows.front().size()));
  for (size_t i = 0; i < rows.size(); ++i) {
    for (size_t j = 0; j < rows[i].size(); ++j) {
      m(static_cast<Index>(i), static_cast<Index>(j)) = rows[i][j];
    }
  }
  return m;
}

void write_study_csv(const std::filesystem::path& path, const StudyResult& result) {
  std::ostringstream out;
  out << "n,delta_n,mean_err,stderr,bn_hat\n";
  for (const StudyCell& c : result.cells) {
    out << c.n << "," << format_double(c.delta_n) << "," << format_double(c.mean_err) << ","
        << format_double(c.stderr_err) << "," << format_double(c.bn_hat) << "\n";
  }
  write_text(path, out.str());
}

void write_timing_csv(const std::filesystem::path& path, const StudyResult& result) {
  std::ostringstream out;
  out << "n,delta_n,seconds\n";
  for (const StudyCell& c : result.cells) {
    out << c.n << "," << format_double(c.delta_n) << "," << format_double(c.seconds) << "\n";
  }
  write_text(path, out.str());
}

void write_bn_csv(const std::filesystem::path& path, const BnSweepResult& result) {
  std::ostringstream out;
  out << "delta_n,bn_hat,bn_hat_refined\n";
  for (size_t i = 0; i < result.delta_n.size(); ++i) {
    out << format_double(result.delta_n[i]) << "," << format_double(result.bn_hat[i]) << ","
        << format_double(result.bn_hat_refined[i]) << "\n";
  }
  write_text(path, out.str());
}

// ---------------------------------------------------------------------------
// JSON summaries
// ---------------------------------------------------------------------------

namespace {

json slope_json(const SlopeFit& fit) {
  json j;
  if (fit.defined) {
    j["slope"] = fit.slope;
    j["intercept"] = fit.intercept;
    j["stderr"] = fit.stderr_slope;
  } else {
    j["slope"] = nullptr;
    j["intercept"] = nullptr;
    j["stderr"] = nullptr;
  }
  j["defined"] = fit.defined;
  return j;
}

}  // namespace

std::string study_summary_json(const StudyConfig& cfg, const StudyResult& result) {
  json root;
  root["fit"] = slope_json(result.slope);
  json cells = json::array();
  for (const StudyCell& c : result.cells) {
    cells.push_back(json{{"n", c.n},
                         {"delta_n", c.delta_n},
                         {"mean_err", c.mean_err},
                         {"stderr", c.stderr_err},
                         {"bn_hat", c.bn_hat}});
  }
  root["cells"] = cells;
  root["monotone_fraction"] = result.monotone_fraction;
  root["envelope_ratio"] =
      std::isfinite(result.envelope_ratio) ? json(result.envelope_ratio) : json(nullptr);
  json pass;
  pass["slope_in_band"] = result.slope.defined && result.slope.slope >= cfg.slope_band[0] &&
                          result.slope.slope <= cfg.slope_band[1];
  bool decreasing = true;
  for (size_t j = 0; j + 1 < result.cells.size(); ++j) {
    decreasing = decreasing && result.cells[j + 1].mean_err < result.cells[j].mean_err;
  }
  pass["mean_err_strictly_decreasing"] = decreasing && result.cells.size() >= 2;
  root["pass"] = pass;
  if (result.has_drift_diff) {
    json drift;
    drift["diff_mean"] = result.drift_diff_mean;
    drift["diff_stderr"] = result.drift_diff_stderr;
    drift["fit"] = slope_json(result.drift_slope);
    root["drift_comparison"] = drift;
  }
  CliConfig echo;
  echo.study = cfg;
  root["config"] = json::parse(resolved_config_json(echo));
  return root.dump(2);
}

std::string bn_summary_json(const StudyConfig& cfg, const BnSweepResult& result) {
  json root;
  root["fit"] = slope_json(result.slope);
  root["delta_n"] = result.delta_n;
  root["bn_hat"] = result.bn_hat;
  root["bn_hat_refined"] = result.bn_hat_refined;
  double max_delta = 0.0;
  for (size_t i = 0; i < result.bn_hat.size(); ++i) {
    if (result.bn_hat[i] > 0.0) {
      max_delta = std::max(
          max_delta, (result.bn_hat_refined[i] - result.bn_hat[i]) / result.bn_hat[i]);
    }
  }
  root["max_subgrid_refinement_delta"] = max_delta;
  CliConfig echo;
  echo.study = cfg;
  echo.deltas = result.delta_n;
  root["config"] = json::parse(resolved_config_json(echo));
  return root.dump(2);
}

std::string moment_report_json(const MomentReport& rep) {
  json root;
  root["delta"] = rep.delta;
  root["samples"] = rep.samples;
  root["second_moment"] = json{{"sample", rep.mean_sq},
                               {"stderr", rep.se_sq},
                               {"theoretical", rep.theo_sq},
                               {"pass_3se", rep.pass_sq}};
  root["fourth_moment"] = json{{"sample", rep.mean_fourth},
                               {"stderr", rep.se_fourth},
                               {"theoretical", rep.theo_fourth},
                               {"pass_3se", rep.pass_fourth}};
  return root.dump(2);
}

}  // namespace sarcv::io
