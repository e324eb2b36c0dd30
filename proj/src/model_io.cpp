#include "canonscreen/model_io.hpp"

#include <array>
#include <bit>
#include <cstring>
#include <fstream>
#include <json.hpp>
#include <sstream>

#include "canonscreen/error.hpp"

namespace canonscreen {

using nlohmann::json;

namespace {

constexpr char kAlphabet[] = "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";

std::string base64_encode(const std::vector<unsigned char>& bytes) {
  std::string out;
  out.reserve((bytes.size() + 2) / 3 * 4);
  std::size_t i = 0;
  for (; i + 2 < bytes.size(); i += 3) {
    const unsigned v = (bytes[i] << 16) | (bytes[i + 1] << 8) | bytes[i + 2];
    for (int s = 18; s >= 0; s -= 6) out += kAlphabet[(v >> s) & 63];
  }
  const std::size_t rest = bytes.size() - i;
  if (rest > 0) {
    unsigned v = bytes[i] << 16;
    if (rest == 2) v |= bytes[i + 1] << 8;
    out += kAlphabet[(v >> 18) & 63];
    out += kAlphabet[(v >> 12) & 63];
    out += rest == 2 ? kAlphabet[(v >> 6) & 63] : '=';
    out += '=';
  }
  return out;
}

std::vector<unsigned char> base64_decode(const std::string& text) {
  std::array<int, 256> table;
  table.fill(-1);
  for (int i = 0; i < 64; ++i) table[static_cast<unsigned char>(kAlphabet[i])] = i;
  if (text.size() % 4 != 0) throw Error(ErrorCode::CorruptModel, "base64 blob has invalid length");
  std::vector<unsigned char> out;
  out.reserve(text.size() / 4 * 3);
  for (std::size_t i = 0; i < text.size(); i += 4) {
    int q[4];
    int pad = 0;
    for (int j = 0; j < 4; ++j) {
      const char c = text[i + j];
      if (c == '=' && i + 4 == text.size() && j >= 2) {
        q[j] = 0;
        ++pad;
      } else {
        q[j] = pad > 0 ? -1 : table[static_cast<unsigned char>(c)];
        if (q[j] < 0) throw Error(ErrorCode::CorruptModel, "invalid base64 character");
      }
    }
    const unsigned v = (q[0] << 18) | (q[1] << 12) | (q[2] << 6) | q[3];
    out.push_back(static_cast<unsigned char>(v >> 16));
    if (pad < 2) out.push_back(static_cast<unsigned char>((v >> 8) & 255));
    if (pad < 1) out.push_back(static_cast<unsigned char>(v & 255));
  }
  return out;
}

json encode(const Eigen::MatrixXd& m) {
  std::vector<unsigned char> bytes(static_cast<std::size_t>(m.size()) * 8);
  for (Eigen::Index i = 0; i < m.size(); ++i) {
    std::uint64_t bits = std::bit_cast<std::uint64_t>(m.data()[i]);
    for (int b = 0; b < 8; ++b) bytes[static_cast<std::size_t>(i) * 8 + b] = static_cast<unsigned char>(bits >> (8 * b));
  }
  return {{"shape", {m.rows(), m.cols()}}, {"data", base64_encode(bytes)}};
}

Eigen::MatrixXd decode(const json& j) {
  const auto rows = j.at("shape").at(0).get<Eigen::Index>();
  const auto cols = j.at("shape").at(1).get<Eigen::Index>();
  if (rows < 0 || cols < 0 || j.at("shape").size() != 2) throw Error(ErrorCode::CorruptModel, "invalid matrix shape");
  const auto bytes = base64_decode(j.at("data").get<std::string>());
  if (bytes.size() != static_cast<std::size_t>(rows * cols) * 8)
    throw Error(ErrorCode::CorruptModel, "matrix blob size does not match its shape");
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index i = 0; i < m.size(); ++i) {
    std::uint64_t bits = 0;
    for (int b = 0; b < 8; ++b) bits |= std::uint64_t{bytes[static_cast<std::size_t>(i) * 8 + b]} << (8 * b);
    m.data()[i] = std::bit_cast<double>(bits);
  }
  return m;
}

Eigen::VectorXd decode_vector(const json& j) {
  Eigen::MatrixXd m = decode(j);
  if (m.cols() != 1) throw Error(ErrorCode::CorruptModel, "expected a column vector");
  return m.col(0);
}

json encode_scaling(const SideScaling& s) {
  return {{"mean", encode(s.mean)}, {"scale", encode(s.scale)}, {"zero_variance", s.zero_variance}};
}

SideScaling decode_scaling(const json& j) {
  SideScaling s;
  s.mean = decode_vector(j.at("mean"));
  s.scale = decode_vector(j.at("scale"));
  s.zero_variance = j.at("zero_variance").get<std::vector<bool>>();
  if (s.scale.size() != s.mean.size() || s.zero_variance.size() != static_cast<std::size_t>(s.mean.size()))
    throw Error(ErrorCode::CorruptModel, "centering record sizes disagree");
  return s;
}

json encode_side(const SideModel& s, bool kernel) {
  json j = {{"column_names", s.column_names},
            {"training", encode(s.training)},
            {"directions", encode(s.directions)},
            {"variates", encode(s.variates)}};
  if (!kernel) return j;
  j["kernel"] = {{"family", kernel_family_name(s.spec.family)},
                 {"sigma", s.spec.sigma},
                 {"k", s.spec.k},
                 {"literal_bandwidth", s.spec.literal_bandwidth}};
  j["gram"] = encode(s.gram);
  j["indefinite_gram"] = encode(s.indefinite_gram);
  j["clip_projector"] = encode(s.clip_projector);
  if (s.graph) {
    j["graph"] = {{"k", s.graph->k},
                  {"adjacency", encode(s.graph->adjacency.cast<double>())},
                  {"kth_neighbor_distance", encode(s.graph->kth_neighbor_distance)},
                  {"degree", encode(s.graph->degree)}};
  }
  return j;
}

SideModel decode_side(const json& j, bool kernel, Eigen::Index n, int p) {
  SideModel s;
  s.column_names = j.at("column_names").get<std::vector<std::string>>();
  s.training = decode(j.at("training"));
  s.directions = decode(j.at("directions"));
  s.variates = decode(j.at("variates"));
  const Eigen::Index d = s.training.cols();
  if (s.training.rows() != n || static_cast<std::size_t>(d) != s.column_names.size() ||
      s.directions.rows() != (kernel ? n : d) || s.directions.cols() != p || s.variates.rows() != n ||
      s.variates.cols() != p)
    throw Error(ErrorCode::CorruptModel, "side matrices have inconsistent shapes");
  if (!kernel) return s;
  const json& k = j.at("kernel");
  s.spec.family = parse_kernel_family(k.at("family").get<std::string>());
  s.spec.sigma = k.at("sigma").get<double>();
  s.spec.k = k.at("k").get<int>();
  s.spec.literal_bandwidth = k.at("literal_bandwidth").get<bool>();
  s.spec.validate();
  s.gram = decode(j.at("gram"));
  s.indefinite_gram = decode(j.at("indefinite_gram"));
  s.clip_projector = decode(j.at("clip_projector"));
  if (s.gram.rows() != n || s.gram.cols() != n) throw Error(ErrorCode::CorruptModel, "Gram matrix has the wrong shape");
  if (j.contains("graph")) {
    const json& g = j.at("graph");
    NeighborhoodGraph graph;
    graph.k = g.at("k").get<int>();
    graph.adjacency = decode(g.at("adjacency")).array() != 0.0;
    graph.kth_neighbor_distance = decode_vector(g.at("kth_neighbor_distance"));
    graph.degree = decode_vector(g.at("degree"));
    if (graph.kth_neighbor_distance.size() != n || graph.degree.size() != n || graph.k != s.spec.k)
      throw Error(ErrorCode::CorruptModel, "neighborhood graph is inconsistent with the model");
    s.graph = std::move(graph);
  } else if (s.spec.family == KernelFamily::Ngl) {
    throw Error(ErrorCode::CorruptModel, "ngl side lacks its neighborhood graph");
  }
  return s;
}

}  // namespace

std::string model_to_json(const CanonicalModel& m) {
  json j = {{"format", "canonscreen-model"},
            {"format_version", kModelFormatVersion},
            {"method", method_name(m.method)},
            {"projection", projection_mode_name(m.projection)},
            {"kappa", m.kappa},
            {"jitter", m.jitter},
            {"standardize", m.standardize},
            {"requested_p", m.requested_p},
            {"p", m.p},
            {"rank_deficient", m.rank_deficient},
            {"correlations", encode(m.correlations)},
            {"training_ids", m.training_ids},
            {"centering", {{"protein", encode_scaling(m.centering.protein)}, {"ligand", encode_scaling(m.centering.ligand)}}},
            {"protein", encode_side(m.protein, m.is_kernel())},
            {"ligand", encode_side(m.ligand, m.is_kernel())}};
  return j.dump(1) + "\n";
}

CanonicalModel model_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::CorruptModel, std::string("model file is not valid JSON: ") + e.what());
  }
  try {
    if (!j.is_object() || j.value("format", "") != "canonscreen-model")
      throw Error(ErrorCode::CorruptModel, "not a canonscreen model file");
    const json& version = j.at("format_version");
    if (!version.is_number_integer() || version.get<int>() != kModelFormatVersion)
      throw Error(ErrorCode::UnsupportedVersion, "model format_version " + version.dump() + " is not supported (expected " +
                                                     std::to_string(kModelFormatVersion) + ")");
    CanonicalModel m;
    m.method = parse_method(j.at("method").get<std::string>());
    m.projection = parse_projection_mode(j.at("projection").get<std::string>());
    m.kappa = j.at("kappa").get<double>();
    m.jitter = j.at("jitter").get<double>();
    m.standardize = j.at("standardize").get<bool>();
    m.requested_p = j.at("requested_p").get<int>();
    m.p = j.at("p").get<int>();
    m.rank_deficient = j.at("rank_deficient").get<bool>();
    m.correlations = decode_vector(j.at("correlations"));
    m.training_ids = j.at("training_ids").get<std::vector<std::string>>();
    m.centering.protein = decode_scaling(j.at("centering").at("protein"));
    m.centering.ligand = decode_scaling(j.at("centering").at("ligand"));
    if (m.p < 1 || m.correlations.size() != m.p) throw Error(ErrorCode::CorruptModel, "correlation count does not match p");
    const auto n = static_cast<Eigen::Index>(m.training_ids.size());
    m.protein = decode_side(j.at("protein"), m.is_kernel(), n, m.p);
    m.ligand = decode_side(j.at("ligand"), m.is_kernel(), n, m.p);
    if (m.centering.protein.mean.size() != m.protein.training.cols() ||
        m.centering.ligand.mean.size() != m.ligand.training.cols())
      throw Error(ErrorCode::CorruptModel, "centering record does not match descriptor counts");
    return m;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::CorruptModel, std::string("model file is malformed: ") + e.what());
  } catch (const Error& e) {
    if (e.code() == ErrorCode::UnsupportedVersion || e.code() == ErrorCode::CorruptModel) throw;
    throw Error(ErrorCode::CorruptModel, e.what());
  }
}

void save_model(const CanonicalModel& model, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::Io, "cannot write '" + path.string() + "'");
  out << model_to_json(model);
  if (!out) throw Error(ErrorCode::Io, "failed writing '" + path.string() + "'");
}

CanonicalModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot open '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return model_from_json(buf.str());
}

}  // namespace canonscreen
