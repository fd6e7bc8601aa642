#include "lvcheck/checkpoint.hpp"
#include "lvcheck/error.hpp"

#include <fstream>
#include <set>
#include <sstream>

namespace lvcheck {

namespace {

using nlohmann::json;
using nlohmann::ordered_json;

ordered_json matrix_to_json(const Matrix& m) {
  return {{"rows", m.rows()}, {"cols", m.cols()}, {"data", m.data()}};
}

Matrix matrix_from_json(const json& j) {
  Matrix m(j.at("rows").get<std::size_t>(), j.at("cols").get<std::size_t>());
  const auto data = j.at("data").get<std::vector<double>>();
  if (data.size() != m.size()) throw Error(ErrorCode::ShapeMismatch, "checkpoint matrix size");
  m.data() = data;
  return m;
}

}  // namespace

ordered_json config_to_json(const GcnConfig& c) {
  return {
      {"n_nodes", c.n_nodes},
      {"in_dim", c.in_dim},
      {"hidden_dims", c.hidden_dims},
      {"n_conv_per_block", c.n_conv_per_block},
      {"n_blocks", c.n_blocks},
      {"fc_dim", c.fc_dim},
      {"n_classes", c.n_classes},
      {"learning_rate", c.learning_rate},
      {"epochs", c.epochs},
      {"seed", c.seed},
      {"pooling", std::string(to_string(c.pooling))},
      {"use_fc", c.use_fc},
      {"eval_every", c.eval_every},
  };
}

GcnConfig config_from_json(const json& j, GcnConfig c) {
  static const std::set<std::string> known{"n_nodes", "in_dim",    "hidden_dims",   "n_conv_per_block", "n_blocks",
                                           "fc_dim",  "n_classes", "learning_rate", "epochs",           "seed",
                                           "pooling", "use_fc",    "eval_every"};
  if (!j.is_object()) throw Error(ErrorCode::BadConfig, "gcn config must be an object");
  for (const auto& [k, v] : j.items()) {
    if (!known.contains(k)) throw Error(ErrorCode::BadConfig, "unknown gcn key \"" + k + "\"");
  }
  try {
    if (j.contains("n_nodes")) c.n_nodes = j["n_nodes"].get<std::size_t>();
    if (j.contains("in_dim")) c.in_dim = j["in_dim"].get<std::size_t>();
    if (j.contains("hidden_dims")) c.hidden_dims = j["hidden_dims"].get<std::vector<std::size_t>>();
    if (j.contains("n_conv_per_block")) c.n_conv_per_block = j["n_conv_per_block"].get<std::size_t>();
    if (j.contains("n_blocks")) c.n_blocks = j["n_blocks"].get<std::size_t>();
    if (j.contains("fc_dim")) c.fc_dim = j["fc_dim"].get<std::size_t>();
    if (j.contains("n_classes")) c.n_classes = j["n_classes"].get<std::size_t>();
    if (j.contains("learning_rate")) c.learning_rate = j["learning_rate"].get<double>();
    if (j.contains("epochs")) c.epochs = j["epochs"].get<std::size_t>();
    if (j.contains("seed")) c.seed = j["seed"].get<std::uint64_t>();
    if (j.contains("pooling")) c.pooling = parse_pooling(j["pooling"].get<std::string>());
    if (j.contains("use_fc")) c.use_fc = j["use_fc"].get<bool>();
    if (j.contains("eval_every")) c.eval_every = j["eval_every"].get<std::size_t>();
  } catch (const json::exception& e) {
    throw Error(ErrorCode::BadConfig, e.what());
  }
  return c;
}

std::string save_model(const GcnModel& m) {
  ordered_json doc;
  doc["format"] = "lvcheck-gcn";
  doc["version"] = kCheckpointVersion;
  doc["config"] = config_to_json(m.config);
  ordered_json convs = ordered_json::array();
  for (const auto& w : m.conv_weights) convs.push_back(matrix_to_json(w));
  doc["conv_weights"] = std::move(convs);
  doc["fc_weight"] = matrix_to_json(m.fc_weight);
  doc["fc_bias"] = m.fc_bias;
  return doc.dump(1) + "\n";
}

GcnModel load_model(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::BadConfig, std::string("checkpoint is not JSON: ") + e.what());
  }
  try {
    if (doc.value("format", "") != "lvcheck-gcn") throw Error(ErrorCode::BadConfig, "not an lvcheck checkpoint");
    if (doc.at("version").get<int>() != kCheckpointVersion) {
      throw Error(ErrorCode::BadConfig, "unsupported checkpoint version " + doc.at("version").dump());
    }
    GcnModel m;
    m.config = config_from_json(doc.at("config"));
    m.config.validate();
    for (const auto& w : doc.at("conv_weights")) m.conv_weights.push_back(matrix_from_json(w));
    m.fc_weight = matrix_from_json(doc.at("fc_weight"));
    m.fc_bias = doc.at("fc_bias").get<std::vector<double>>();

    const auto dims = m.config.conv_out_dims();
    if (m.conv_weights.size() != dims.size()) throw Error(ErrorCode::ShapeMismatch, "conv layer count");
    std::size_t in = m.config.in_dim;
    for (std::size_t l = 0; l < dims.size(); ++l) {
      if (m.conv_weights[l].rows() != in || m.conv_weights[l].cols() != dims[l]) {
        throw Error(ErrorCode::ShapeMismatch, "conv weight " + std::to_string(l));
      }
      in = dims[l];
    }
    if (m.config.use_fc && (m.fc_weight.rows() != in || m.fc_weight.cols() != m.config.n_classes ||
                            m.fc_bias.size() != m.config.n_classes)) {
      throw Error(ErrorCode::ShapeMismatch, "fc layer");
    }
    return m;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::BadConfig, std::string("malformed checkpoint: ") + e.what());
  }
}

void write_model_file(const GcnModel& model, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::Io, "cannot write " + path);
  out << save_model(model);
}

GcnModel read_model_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return load_model(buf.str());
}

std::string model_info(const GcnModel& m) {
  std::ostringstream os;
  const auto& c = m.config;
  os << "format: lvcheck-gcn v" << kCheckpointVersion << '\n';
  os << "nodes (padding threshold): " << c.n_nodes << '\n';
  os << "input features: " << c.in_dim << '\n';
  os << "blocks: " << c.n_blocks << " x " << c.n_conv_per_block << " conv\n";
  os << "pooling: " << to_string(c.pooling) << '\n';
  std::size_t params = 0;
  for (std::size_t l = 0; l < m.conv_weights.size(); ++l) {
    os << "conv[" << l << "]: " << m.conv_weights[l].rows() << " x " << m.conv_weights[l].cols() << '\n';
    params += m.conv_weights[l].size();
  }
  if (c.use_fc) {
    os << "fc: " << m.fc_weight.rows() << " x " << m.fc_weight.cols() << " + bias " << m.fc_bias.size() << '\n';
    params += m.fc_weight.size() + m.fc_bias.size();
  } else {
    os << "fc: disabled\n";
  }
  os << "classes: " << c.n_classes << '\n';
  os << "parameters: " << params << '\n';
  os << "learning_rate: " << c.learning_rate << "  epochs: " << c.epochs << "  seed: " << c.seed << '\n';
  return os.str();
}

}  // namespace lvcheck
