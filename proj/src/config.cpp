#include "rfclt/config.hpp"

#include <algorithm>
#include <fstream>
#include <initializer_list>
#include <limits>
#include <sstream>

#include <toml++/toml.hpp>

#include "json.hpp"
#include "rfclt/error.hpp"

namespace rfclt {

ExperimentPlan RunConfig::plan() const {
  ExperimentPlan p;
  p.model = model;
  p.frequencies = frequencies;
  p.shapes = shapes;
  p.replicates = replicates;
  p.master_seed = master_seed;
  p.clt = clt;
  p.periodogram = periodogram;
  return p;
}

namespace {

class Reader {
 public:
  explicit Reader(std::string source) : source_(std::move(source)) {}

  [[noreturn]] void fail(const toml::node* node, const std::string& field, const std::string& message,
                         ErrorKind kind = ErrorKind::Config) const {
    std::string where = source_;
    if (node != nullptr && node->source().begin.line > 0) {
      where += ":" + std::to_string(node->source().begin.line) + ":" + std::to_string(node->source().begin.column);
    }
    throw Error(kind, where + ": " + field + ": " + message);
  }

  void check_keys(const toml::table& table, const std::string& path,
                  std::initializer_list<std::string_view> allowed) const {
    for (auto&& [key, node] : table) {
      if (std::find(allowed.begin(), allowed.end(), key.str()) == allowed.end()) {
        std::string list;
        for (auto a : allowed) list += (list.empty() ? "" : ", ") + std::string(a);
        fail(&node, join(path, key.str()), "unknown key (allowed: " + list + ")");
      }
    }
  }

  static std::string join(const std::string& path, std::string_view key) {
    return path.empty() ? std::string(key) : path + "." + std::string(key);
  }

  const toml::table& table(const toml::node& node, const std::string& field) const {
    if (const auto* t = node.as_table()) return *t;
    fail(&node, field, "expected a table");
  }

  const toml::array& array(const toml::node& node, const std::string& field) const {
    if (const auto* a = node.as_array()) return *a;
    fail(&node, field, "expected an array");
  }

  std::int64_t integer(const toml::node& node, const std::string& field) const {
    if (const auto* v = node.as_integer()) return v->get();
    fail(&node, field, "expected an integer");
  }

  std::int64_t integer_at_least(const toml::node& node, const std::string& field, std::int64_t lo) const {
    const std::int64_t v = integer(node, field);
    if (v < lo) fail(&node, field, "must be at least " + std::to_string(lo));
    return v;
  }

  double number(const toml::node& node, const std::string& field) const {
    if (const auto* v = node.as_floating_point()) return v->get();
    if (const auto* v = node.as_integer()) return static_cast<double>(v->get());
    fail(&node, field, "expected a decimal number");
  }

  std::string string(const toml::node& node, const std::string& field) const {
    if (const auto* v = node.as_string()) return v->get();
    fail(&node, field, "expected a string");
  }

  bool boolean(const toml::node& node, const std::string& field) const {
    if (const auto* v = node.as_boolean()) return v->get();
    fail(&node, field, "expected true or false");
  }

  std::vector<std::int64_t> integers(const toml::node& node, const std::string& field,
                                     std::optional<std::size_t> length = std::nullopt) const {
    const toml::array& a = array(node, field);
    if (length && a.size() != *length) {
      fail(&node, field, "expected " + std::to_string(*length) + " entries, got " + std::to_string(a.size()));
    }
    std::vector<std::int64_t> out;
    for (std::size_t i = 0; i < a.size(); ++i) out.push_back(integer(a[i], field + "[" + std::to_string(i) + "]"));
    return out;
  }

  std::vector<double> numbers(const toml::node& node, const std::string& field, std::size_t length) const {
    const toml::array& a = array(node, field);
    if (a.size() != length) {
      fail(&node, field, "expected " + std::to_string(length) + " entries, got " + std::to_string(a.size()));
    }
    std::vector<double> out;
    for (std::size_t i = 0; i < a.size(); ++i) out.push_back(number(a[i], field + "[" + std::to_string(i) + "]"));
    return out;
  }

  Lag lag(const toml::node& node, const std::string& field, int dim) const {
    const auto v = integers(node, field, static_cast<std::size_t>(dim));
    Lag l{0, 0, 0};
    std::copy(v.begin(), v.end(), l.begin());
    return l;
  }

  LatticeShape shape(const toml::node& node, const std::string& field, int dim) const {
    const auto v = integers(node, field, static_cast<std::size_t>(dim));
    std::array<std::int64_t, kMaxDim> e{1, 1, 1};
    for (int i = 0; i < dim; ++i) {
      if (v[static_cast<std::size_t>(i)] < 1) fail(&node, field, "extents must be positive");
      e[static_cast<std::size_t>(i)] = v[static_cast<std::size_t>(i)];
    }
    return LatticeShape::make(dim, e);
  }

  FrequencyPoint frequency(const toml::node& node, const std::string& field, int dim) const {
    const auto v = numbers(node, field, static_cast<std::size_t>(dim));
    try {
      return FrequencyPoint::make(std::span<const double>(v));
    } catch (const Error& e) {
      fail(&node, field, e.what());
    }
  }

 private:
  std::string source_;
};

FieldModel parse_model(const Reader& in, const toml::table& m) {
  in.check_keys(m, "model", {"kind", "dim", "innovation", "half_width", "phi", "kernel"});
  const toml::node* kind_node = m.get("kind");
  if (!kind_node) in.fail(&m, "model.kind", "missing (iid, linear, volterra or gaussian_columns)");
  const std::string kind = in.string(*kind_node, "model.kind");
  const toml::node* dim_node = m.get("dim");
  if (!dim_node) in.fail(&m, "model.dim", "missing (1, 2 or 3)");
  const std::int64_t dim64 = in.integer(*dim_node, "model.dim");
  if (dim64 < 1 || dim64 > kMaxDim) in.fail(dim_node, "model.dim", "must be 1, 2 or 3");
  const int dim = static_cast<int>(dim64);

  InnovationSpec innovation = InnovationSpec::standard_normal();
  {
    double half_width = 1.0;
    if (const auto* h = m.get("half_width")) half_width = in.number(*h, "model.half_width");
    if (const auto* i = m.get("innovation")) {
      try {
        innovation = parse_innovation(in.string(*i, "model.innovation"), half_width);
      } catch (const Error& e) {
        in.fail(i, "model.innovation", e.what());
      }
    }
  }

  const toml::node* kernel = m.get("kernel");
  const toml::node* phi = m.get("phi");
  if (kind != "gaussian_columns" && phi) in.fail(phi, "model.phi", "only applies to gaussian_columns");
  if ((kind == "iid" || kind == "gaussian_columns") && kernel) {
    in.fail(kernel, "model.kernel", "not used by kind '" + kind + "'");
  }

  if (kind == "iid") return FieldModel::iid(dim, innovation);
  if (kind == "gaussian_columns") {
    if (!phi) in.fail(&m, "model.phi", "missing AR coefficient for gaussian_columns");
    try {
      return FieldModel::gaussian_columns(dim, in.number(*phi, "model.phi"));
    } catch (const Error& e) {
      in.fail(phi, "model.phi", e.what(), e.kind());
    }
  }
  if (kind != "linear" && kind != "volterra") {
    in.fail(kind_node, "model.kind", "unknown kind '" + kind + "' (expected iid, linear, volterra or gaussian_columns)");
  }
  if (!kernel) in.fail(&m, "model.kernel", "missing kernel entries");
  const toml::array& entries = in.array(*kernel, "model.kernel");
  try {
    if (kind == "linear") {
      std::vector<CoefficientKernel::Entry> list;
      for (std::size_t i = 0; i < entries.size(); ++i) {
        const std::string f = "model.kernel[" + std::to_string(i) + "]";
        const toml::table& e = in.table(entries[i], f);
        in.check_keys(e, f, {"lag", "value"});
        if (!e.get("lag") || !e.get("value")) in.fail(&e, f, "needs lag and value");
        list.push_back({in.lag(*e.get("lag"), f + ".lag", dim), in.number(*e.get("value"), f + ".value")});
      }
      return FieldModel::linear(CoefficientKernel::make(dim, std::move(list)), innovation);
    }
    std::vector<VolterraKernel::Entry> list;
    for (std::size_t i = 0; i < entries.size(); ++i) {
      const std::string f = "model.kernel[" + std::to_string(i) + "]";
      const toml::table& e = in.table(entries[i], f);
      in.check_keys(e, f, {"u", "v", "value"});
      if (!e.get("u") || !e.get("v") || !e.get("value")) in.fail(&e, f, "needs u, v and value");
      list.push_back({in.lag(*e.get("u"), f + ".u", dim), in.lag(*e.get("v"), f + ".v", dim),
                      in.number(*e.get("value"), f + ".value")});
    }
    return FieldModel::volterra(VolterraKernel::make(dim, std::move(list)), innovation);
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::Config) throw;
    in.fail(kernel, "model.kernel", e.what(), e.kind());
  }
}

std::vector<FrequencyPoint> default_clt_frequencies(int dim) {
  const auto all = default_frequencies(dim);
  return {all[0], all[1], all[3]};
}

LatticeShape default_shape(int dim) {
  return LatticeShape::cube(dim, dim == 1 ? 4096 : dim == 2 ? 64 : 16);
}

RunConfig parse_table(const toml::table& root, const std::string& source) {
  const Reader in(source);
  in.check_keys(root, "", {"model", "experiment", "spectrum", "lln", "output"});
  const toml::node* model_node = root.get("model");
  if (!model_node) in.fail(nullptr, "model", "missing [model] section");

  RunConfig cfg;
  cfg.model = parse_model(in, in.table(*model_node, "model"));
  const int dim = cfg.model.dim();
  cfg.frequencies = default_clt_frequencies(dim);
  cfg.shapes = {default_shape(dim)};

  if (const toml::node* node = root.get("experiment")) {
    const toml::table& x = in.table(*node, "experiment");
    in.check_keys(x, "experiment", {"frequencies", "shapes", "replicates", "master_seed", "tests", "truncation"});
    if (const auto* f = x.get("frequencies")) {
      const toml::array& a = in.array(*f, "experiment.frequencies");
      cfg.frequencies.clear();
      for (std::size_t i = 0; i < a.size(); ++i) {
        cfg.frequencies.push_back(in.frequency(a[i], "experiment.frequencies[" + std::to_string(i) + "]", dim));
      }
    }
    if (const auto* s = x.get("shapes")) {
      const toml::array& a = in.array(*s, "experiment.shapes");
      cfg.shapes.clear();
      for (std::size_t i = 0; i < a.size(); ++i) {
        cfg.shapes.push_back(in.shape(a[i], "experiment.shapes[" + std::to_string(i) + "]", dim));
      }
    }
    if (const auto* r = x.get("replicates")) {
      cfg.replicates = static_cast<std::size_t>(in.integer_at_least(*r, "experiment.replicates", 1));
    }
    if (const auto* s = x.get("master_seed")) {
      cfg.master_seed = static_cast<std::uint64_t>(in.integer_at_least(*s, "experiment.master_seed", 0));
    }
    if (const auto* t = x.get("tests")) {
      const toml::array& a = in.array(*t, "experiment.tests");
      cfg.clt = cfg.periodogram = false;
      for (std::size_t i = 0; i < a.size(); ++i) {
        const std::string f = "experiment.tests[" + std::to_string(i) + "]";
        const std::string name = in.string(a[i], f);
        if (name == "clt") {
          cfg.clt = true;
        } else if (name == "periodogram") {
          cfg.periodogram = true;
        } else {
          in.fail(&a[i], f, "unknown test '" + name + "' (expected clt or periodogram)");
        }
      }
    }
    if (const auto* t = x.get("truncation")) cfg.truncation = in.integer_at_least(*t, "experiment.truncation", 0);
  }

  if (const toml::node* node = root.get("spectrum")) {
    const toml::table& s = in.table(*node, "spectrum");
    in.check_keys(s, "spectrum", {"grid", "radius", "shape"});
    if (const auto* g = s.get("grid")) {
      const auto v = in.integers(*g, "spectrum.grid", static_cast<std::size_t>(dim));
      for (int i = 0; i < dim; ++i) {
        if (v[static_cast<std::size_t>(i)] < 1) in.fail(g, "spectrum.grid", "grid extents must be positive");
        cfg.spectrum.grid[static_cast<std::size_t>(i)] = v[static_cast<std::size_t>(i)];
      }
    }
    if (const auto* r = s.get("radius")) cfg.spectrum.radius = in.integer_at_least(*r, "spectrum.radius", 1);
    if (const auto* sh = s.get("shape")) cfg.spectrum.shape = in.shape(*sh, "spectrum.shape", dim);
  }
  for (int i = dim; i < kMaxDim; ++i) cfg.spectrum.grid[static_cast<std::size_t>(i)] = 1;

  if (const toml::node* node = root.get("lln")) {
    const toml::table& l = in.table(*node, "lln");
    in.check_keys(l, "lln", {"t", "n2", "n1", "rotate"});
    if (const auto* t = l.get("t")) {
      const auto v = in.numbers(*t, "lln.t", 2);
      try {
        cfg.lln.t = FrequencyPoint::make(std::span<const double>(v));
      } catch (const Error& e) {
        in.fail(t, "lln.t", e.what());
      }
    }
    if (const auto* n = l.get("n2")) cfg.lln.n2 = in.integer_at_least(*n, "lln.n2", 1);
    if (const auto* n = l.get("n1")) {
      cfg.lln.n1 = in.integers(*n, "lln.n1");
      for (auto v : cfg.lln.n1) {
        if (v < 1) in.fail(n, "lln.n1", "ladder entries must be positive");
      }
    }
    if (const auto* r = l.get("rotate")) cfg.lln.rotate = in.boolean(*r, "lln.rotate");
  }

  if (const toml::node* node = root.get("output")) {
    const toml::table& o = in.table(*node, "output");
    in.check_keys(o, "output", {"path", "csv", "timestamp"});
    if (const auto* p = o.get("path")) cfg.output.path = in.string(*p, "output.path");
    if (const auto* c = o.get("csv")) cfg.output.csv = in.string(*c, "output.csv");
    if (const auto* t = o.get("timestamp")) cfg.output.timestamp = in.boolean(*t, "output.timestamp");
  }
  return cfg;
}

// JSON input is mapped onto the same TOML tree so one validator serves both.
void append_json(toml::array& out, const nlohmann::json& j, const std::string& field);

void insert_json(toml::table& out, const std::string& key, const nlohmann::json& j, const std::string& field) {
  if (j.is_object()) {
    toml::table t;
    for (auto it = j.begin(); it != j.end(); ++it) insert_json(t, it.key(), it.value(), field + "." + it.key());
    out.insert_or_assign(key, std::move(t));
  } else if (j.is_array()) {
    toml::array a;
    for (std::size_t i = 0; i < j.size(); ++i) append_json(a, j[i], field + "[" + std::to_string(i) + "]");
    out.insert_or_assign(key, std::move(a));
  } else if (j.is_boolean()) {
    out.insert_or_assign(key, j.get<bool>());
  } else if (j.is_number_unsigned()) {
    const auto v = j.get<std::uint64_t>();
    if (v > static_cast<std::uint64_t>(std::numeric_limits<std::int64_t>::max())) {
      throw Error(ErrorKind::Config, field + ": integer out of range");
    }
    out.insert_or_assign(key, static_cast<std::int64_t>(v));
  } else if (j.is_number_integer()) {
    out.insert_or_assign(key, j.get<std::int64_t>());
  } else if (j.is_number_float()) {
    out.insert_or_assign(key, j.get<double>());
  } else if (j.is_string()) {
    out.insert_or_assign(key, j.get<std::string>());
  } else {
    throw Error(ErrorKind::Config, field + ": null is not allowed");
  }
}

void append_json(toml::array& out, const nlohmann::json& j, const std::string& field) {
  toml::table holder;
  insert_json(holder, "x", j, field);
  out.push_back(std::move(*holder.get("x")));
}

}  // namespace

RunConfig parse_toml_config(std::string_view text, std::string_view source) {
  toml::table root;
  try {
    root = toml::parse(text, source);
  } catch (const toml::parse_error& e) {
    throw Error(ErrorKind::Config, std::string(source) + ":" + std::to_string(e.source().begin.line) + ":" +
                                       std::to_string(e.source().begin.column) + ": " +
                                       std::string(e.description()));
  }
  return parse_table(root, std::string(source));
}

RunConfig parse_json_config(std::string_view text, std::string_view source) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorKind::Config, std::string(source) + ": " + e.what());
  }
  if (!j.is_object()) throw Error(ErrorKind::Config, std::string(source) + ": top level must be an object");
  toml::table root;
  try {
    for (auto it = j.begin(); it != j.end(); ++it) insert_json(root, it.key(), it.value(), it.key());
  } catch (const Error& e) {
    throw Error(e.kind(), std::string(source) + ": " + e.what());
  }
  return parse_table(root, std::string(source));
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream file(path, std::ios::binary);
  if (!file) throw Error(ErrorKind::Io, "cannot read config '" + path.string() + "'");
  std::ostringstream buf;
  buf << file.rdbuf();
  const std::string text = buf.str();
  if (path.extension() == ".json") return parse_json_config(text, path.string());
  return parse_toml_config(text, path.string());
}

}  // namespace rfclt
