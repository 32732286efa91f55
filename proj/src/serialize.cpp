#include "lamarck/serialize.hpp"

#include <json.hpp>

#include <cstring>
#include <stdexcept>

namespace lamarck {
namespace {

using ordered_json = nlohmann::ordered_json;

ordered_json node_to_json(const BodyNode& n) {
  ordered_json j;
  j["id"] = n.id;
  j["kind"] = kind_name(n.kind);
  j["rotation"] = n.rotation;
  j["slot"] = n.slot;
  ordered_json children = ordered_json::array();
  for (const BodyNode& c : n.children) children.push_back(node_to_json(c));
  j["children"] = std::move(children);
  return j;
}

BodyNode node_from_json(const ordered_json& j) {
  BodyNode n;
  n.id = j.at("id").get<std::uint64_t>();
  n.kind = kind_from_name(j.at("kind").get<std::string>());
  n.rotation = j.at("rotation").get<int>();
  n.slot = j.at("slot").get<int>();
  for (const auto& c : j.at("children")) n.children.push_back(node_from_json(c));
  return n;
}

// --- raw little-endian primitives -----------------------------------------

void put_u64(std::ostream& out, std::uint64_t v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(v));
}
void put_i64(std::ostream& out, std::int64_t v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(v));
}
void put_f64(std::ostream& out, double v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(v));
}
void put_u8(std::ostream& out, std::uint8_t v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(v));
}
void put_string(std::ostream& out, const std::string& s) {
  put_u64(out, s.size());
  out.write(s.data(), static_cast<std::streamsize>(s.size()));
}
void put_vec(std::ostream& out, const Eigen::VectorXd& v) {
  put_u64(out, static_cast<std::uint64_t>(v.size()));
  out.write(reinterpret_cast<const char*>(v.data()),
            static_cast<std::streamsize>(sizeof(double) * static_cast<size_t>(v.size())));
}

std::uint64_t get_u64(std::istream& in) {
  std::uint64_t v = 0;
  in.read(reinterpret_cast<char*>(&v), sizeof(v));
  if (!in) throw std::runtime_error("truncated binary stream (u64)");
  return v;
}
std::int64_t get_i64(std::istream& in) {
  std::int64_t v = 0;
  in.read(reinterpret_cast<char*>(&v), sizeof(v));
  if (!in) throw std::runtime_error("truncated binary stream (i64)");
  return v;
}
double get_f64(std::istream& in) {
  double v = 0;
  in.read(reinterpret_cast<char*>(&v), sizeof(v));
  if (!in) throw std::runtime_error("truncated binary stream (f64)");
  return v;
}
std::uint8_t get_u8(std::istream& in) {
  std::uint8_t v = 0;
  in.read(reinterpret_cast<char*>(&v), sizeof(v));
  if (!in) throw std::runtime_error("truncated binary stream (u8)");
  return v;
}
std::string get_string(std::istream& in) {
  const std::uint64_t n = get_u64(in);
  std::string s(n, '\0');
  in.read(s.data(), static_cast<std::streamsize>(n));
  if (!in) throw std::runtime_error("truncated binary stream (string)");
  return s;
}
Eigen::VectorXd get_vec(std::istream& in) {
  const std::uint64_t n = get_u64(in);
  Eigen::VectorXd v(static_cast<Eigen::Index>(n));
  in.read(reinterpret_cast<char*>(v.data()),
          static_cast<std::streamsize>(sizeof(double) * n));
  if (!in) throw std::runtime_error("truncated binary stream (vector)");
  return v;
}

void put_cma_state(std::ostream& out, const CmaState& s) {
  put_i64(out, s.dim);
  put_i64(out, s.lambda);
  put_f64(out, s.sigma);
  put_i64(out, s.iteration);
  put_f64(out, s.min_eig_lb);
  put_i64(out, s.repair_count);
  put_vec(out, s.mean);
  put_vec(out, s.path_sigma);
  put_vec(out, s.path_c);
  for (int j = 0; j < s.dim; ++j) {
    out.write(reinterpret_cast<const char*>(s.chol.col(j).data() + j),
              static_cast<std::streamsize>(sizeof(double) * static_cast<size_t>(s.dim - j)));
  }
}

CmaState get_cma_state(std::istream& in) {
  const int dim = static_cast<int>(get_i64(in));
  const int lambda = static_cast<int>(get_i64(in));
  const double sigma = get_f64(in);
  const std::int64_t iteration = get_i64(in);
  const double min_eig_lb = get_f64(in);
  const std::int64_t repair_count = get_i64(in);
  Eigen::VectorXd mean = get_vec(in);
  Eigen::VectorXd path_sigma = get_vec(in);
  Eigen::VectorXd path_c = get_vec(in);
  CmaState s = cma_init(dim, mean, sigma > 0 ? sigma : 1.0, lambda);
  s.sigma = sigma;
  s.iteration = iteration;
  s.min_eig_lb = min_eig_lb;
  s.repair_count = repair_count;
  s.path_sigma = std::move(path_sigma);
  s.path_c = std::move(path_c);
  s.chol.setZero();
  for (int j = 0; j < dim; ++j) {
    in.read(reinterpret_cast<char*>(s.chol.col(j).data() + j),
            static_cast<std::streamsize>(sizeof(double) * static_cast<size_t>(dim - j)));
  }
  if (!in) throw std::runtime_error("truncated binary stream (cma factor)");
  return s;
}

void put_individual(std::ostream& out, const Individual& ind, bool with_states) {
  put_u64(out, ind.id);
  put_string(out, genotype_json(ind.genotype.root));
  put_u8(out, ind.feasible ? 1 : 0);
  put_f64(out, ind.f_locomotion);
  put_f64(out, ind.f_novelty);
  put_f64(out, ind.f_combined);
  put_f64(out, ind.initial_fitness);
  put_f64(out, ind.d);
  put_f64(out, ind.l);
  put_i64(out, ind.c_hinge);
  put_i64(out, ind.eval_count);
  put_i64(out, ind.birth_generation);
  put_u64(out, ind.parent_ids.size());
  for (std::uint64_t p : ind.parent_ids) put_u64(out, p);
  put_u8(out, ind.closest_parent_id.has_value() ? 1 : 0);
  put_u64(out, ind.closest_parent_id.value_or(0));
  put_u8(out, ind.closest_edit_distance.has_value() ? 1 : 0);
  put_i64(out, ind.closest_edit_distance.value_or(0));
  put_u8(out, ind.parent_dissimilarity.has_value() ? 1 : 0);
  put_f64(out, ind.parent_dissimilarity.value_or(0.0));
  put_vec(out, ind.controller);
  const bool store_state = with_states && ind.has_cma_state;
  put_u8(out, store_state ? 1 : 0);
  if (store_state) put_cma_state(out, ind.cma_state);
}

Individual get_individual(std::istream& in) {
  Individual ind;
  ind.id = get_u64(in);
  ind.genotype.root = genotype_node_from_json(get_string(in));
  ind.feasible = get_u8(in) != 0;
  ind.f_locomotion = get_f64(in);
  ind.f_novelty = get_f64(in);
  ind.f_combined = get_f64(in);
  ind.initial_fitness = get_f64(in);
  ind.d = get_f64(in);
  ind.l = get_f64(in);
  ind.c_hinge = static_cast<int>(get_i64(in));
  ind.eval_count = static_cast<long>(get_i64(in));
  ind.birth_generation = static_cast<int>(get_i64(in));
  const std::uint64_t np = get_u64(in);
  for (std::uint64_t i = 0; i < np; ++i) ind.parent_ids.push_back(get_u64(in));
  const bool has_cp = get_u8(in) != 0;
  const std::uint64_t cp = get_u64(in);
  if (has_cp) ind.closest_parent_id = cp;
  const bool has_ed = get_u8(in) != 0;
  const std::int64_t ed = get_i64(in);
  if (has_ed) ind.closest_edit_distance = static_cast<int>(ed);
  const bool has_pd = get_u8(in) != 0;
  const double pd = get_f64(in);
  if (has_pd) ind.parent_dissimilarity = pd;
  ind.controller = get_vec(in);
  ind.has_cma_state = get_u8(in) != 0;
  if (ind.has_cma_state) ind.cma_state = get_cma_state(in);
  ind.phenotype = build_phenotype(ind.genotype);
  ind.descriptors = compute_descriptors(ind.phenotype);
  return ind;
}

}  // namespace

std::string genotype_json(const BodyNode& node) { return node_to_json(node).dump(); }

BodyNode genotype_node_from_json(const std::string& json) {
  return node_from_json(ordered_json::parse(json));
}

std::string genotype_record_json(const Individual& ind) {
  ordered_json j;
  j["id"] = ind.id;
  j["birth_generation"] = ind.birth_generation;
  j["parents"] = ind.parent_ids;
  j["genotype"] = node_to_json(ind.genotype.root);
  return j.dump();
}

GenotypeRecord genotype_record_from_json(const std::string& line) {
  const ordered_json j = ordered_json::parse(line);
  GenotypeRecord r;
  r.id = j.at("id").get<std::uint64_t>();
  r.birth_generation = j.at("birth_generation").get<int>();
  r.parents = j.at("parents").get<std::vector<std::uint64_t>>();
  r.genotype.root = node_from_json(j.at("genotype"));
  return r;
}

std::string runlog_record_json(const Individual& ind, int gen) {
  ordered_json j;
  j["gen"] = gen;
  j["id"] = ind.id;
  j["parents"] = ind.parent_ids;
  if (ind.closest_parent_id) j["closest_parent"] = *ind.closest_parent_id;
  else j["closest_parent"] = nullptr;
  if (ind.closest_edit_distance) j["edit_distance"] = *ind.closest_edit_distance;
  else j["edit_distance"] = nullptr;
  if (ind.parent_dissimilarity) j["parent_dissimilarity"] = *ind.parent_dissimilarity;
  else j["parent_dissimilarity"] = nullptr;
  ordered_json desc = ordered_json::array();
  for (int i = 0; i < 8; ++i) desc.push_back(ind.descriptors(i));
  j["descriptors"] = std::move(desc);
  j["f_locomotion"] = ind.f_locomotion;
  j["f_novelty"] = ind.f_novelty;
  j["f_combined"] = ind.f_combined;
  j["initial_fitness"] = ind.initial_fitness;
  j["d"] = ind.d;
  j["l"] = ind.l;
  j["c_hinge"] = ind.c_hinge;
  j["eval_count"] = ind.eval_count;
  return j.dump();
}

std::string runlog_summary_json(int gen, double mean_f, double max_f,
                                std::optional<double> mean_parent_dissimilarity,
                                double mean_initial_fitness) {
  ordered_json j;
  j["gen"] = gen;
  j["mean_f"] = mean_f;
  j["max_f"] = max_f;
  if (mean_parent_dissimilarity) j["mean_parent_dissimilarity"] = *mean_parent_dissimilarity;
  else j["mean_parent_dissimilarity"] = nullptr;
  j["mean_initial_fitness"] = mean_initial_fitness;
  return j.dump();
}

std::string transfer_record_json(const TransferRecord& t) {
  ordered_json j;
  j["gen"] = t.gen;
  j["id"] = t.id;
  j["parent_id"] = t.parent_id;
  j["d_p"] = t.d_p;
  j["d_o"] = t.d_o;
  j["shared"] = t.shared;
  j["alpha"] = t.alpha;
  j["sigma_p"] = t.sigma_p;
  j["sigma_o"] = t.sigma_o;
  j["edit_distance"] = t.edit_distance;
  return j.dump();
}

RunLogData parse_runlog(std::istream& in) {
  RunLogData data;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const ordered_json j = ordered_json::parse(line);
    if (j.contains("id")) {
      LogRecord r;
      r.gen = j.at("gen").get<int>();
      r.id = j.at("id").get<std::uint64_t>();
      r.parents = j.at("parents").get<std::vector<std::uint64_t>>();
      if (!j.at("closest_parent").is_null()) {
        r.closest_parent = j.at("closest_parent").get<std::uint64_t>();
      }
      if (!j.at("edit_distance").is_null()) {
        r.edit_distance = j.at("edit_distance").get<int>();
      }
      if (!j.at("parent_dissimilarity").is_null()) {
        r.parent_dissimilarity = j.at("parent_dissimilarity").get<double>();
      }
      const auto& desc = j.at("descriptors");
      for (int i = 0; i < 8; ++i) r.descriptors[static_cast<size_t>(i)] = desc.at(i).get<double>();
      r.f_locomotion = j.at("f_locomotion").get<double>();
      r.f_novelty = j.at("f_novelty").get<double>();
      r.f_combined = j.at("f_combined").get<double>();
      r.initial_fitness = j.at("initial_fitness").get<double>();
      r.d = j.at("d").get<double>();
      r.l = j.at("l").get<double>();
      r.c_hinge = j.at("c_hinge").get<int>();
      r.eval_count = j.at("eval_count").get<long>();
      data.records.push_back(std::move(r));
    } else {
      SummaryRecord s;
      s.gen = j.at("gen").get<int>();
      s.mean_f = j.at("mean_f").get<double>();
      s.max_f = j.at("max_f").get<double>();
      if (!j.at("mean_parent_dissimilarity").is_null()) {
        s.mean_parent_dissimilarity = j.at("mean_parent_dissimilarity").get<double>();
      }
      s.mean_initial_fitness = j.at("mean_initial_fitness").get<double>();
      data.summaries.push_back(s);
    }
  }
  return data;
}

void append_controller(std::ostream& out, std::uint64_t id, int h, const ParamVector& params) {
  put_u64(out, id);
  put_u64(out, static_cast<std::uint64_t>(h));
  put_vec(out, params);
}

std::optional<ControllerEntry> read_controller_entry(std::istream& in) {
  std::uint64_t id = 0;
  in.read(reinterpret_cast<char*>(&id), sizeof(id));
  if (in.gcount() == 0 || !in) return std::nullopt;
  ControllerEntry e;
  e.id = id;
  e.h = static_cast<int>(get_u64(in));
  e.params = get_vec(in);
  return e;
}

std::optional<ControllerEntry> find_controller(std::istream& in, std::uint64_t id) {
  while (auto e = read_controller_entry(in)) {
    if (e->id == id) return e;
  }
  return std::nullopt;
}

void write_run_state(std::ostream& out, const RunState& state, bool with_cma_states) {
  out.write("LMRK", 4);
  put_u64(out, 1);  // format version
  put_i64(out, state.generation);
  put_u64(out, state.next_id);
  put_i64(out, state.total_evaluations);
  put_u8(out, with_cma_states ? 1 : 0);
  put_u64(out, state.population.size());
  for (const Individual& ind : state.population) put_individual(out, ind, with_cma_states);
  put_u64(out, state.archive.size());
  for (const ArchiveEntry& e : state.archive) {
    put_u64(out, e.owner);
    for (int i = 0; i < 8; ++i) put_f64(out, e.descriptors(i));
  }
}

RunState read_run_state(std::istream& in) {
  char magic[4] = {};
  in.read(magic, 4);
  if (!in || std::memcmp(magic, "LMRK", 4) != 0) {
    throw std::runtime_error("not a checkpoint payload (bad magic)");
  }
  const std::uint64_t version = get_u64(in);
  if (version != 1) throw std::runtime_error("unsupported checkpoint version");
  RunState st;
  st.generation = static_cast<int>(get_i64(in));
  st.next_id = get_u64(in);
  st.total_evaluations = static_cast<long>(get_i64(in));
  (void)get_u8(in);  // with_cma_states marker; individuals carry their own flag
  const std::uint64_t pop = get_u64(in);
  st.population.reserve(pop);
  for (std::uint64_t i = 0; i < pop; ++i) st.population.push_back(get_individual(in));
  const std::uint64_t na = get_u64(in);
  st.archive.reserve(na);
  for (std::uint64_t i = 0; i < na; ++i) {
    ArchiveEntry e;
    e.owner = get_u64(in);
    for (int k = 0; k < 8; ++k) e.descriptors(k) = get_f64(in);
    st.archive.push_back(e);
  }
  return st;
}

}  // namespace lamarck
