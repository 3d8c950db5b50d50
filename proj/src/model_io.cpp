#include "csvor/model_io.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "csvor/common.hpp"
#include "json.hpp"

namespace csvor {

using nlohmann::ordered_json;

namespace {

ordered_json vec_json(const Eigen::VectorXd& v) {
  ordered_json a = ordered_json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v(i));
  return a;
}

Eigen::VectorXd json_vec(const ordered_json& a, const char* name) {
  if (!a.is_array()) throw DataError(std::string("model field '") + name + "' must be an array");
  Eigen::VectorXd v(static_cast<Eigen::Index>(a.size()));
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (!a[i].is_number()) throw DataError(std::string("model field '") + name + "' must hold numbers");
    v(static_cast<Eigen::Index>(i)) = a[i].get<double>();
  }
  return v;
}

const ordered_json& field(const ordered_json& doc, const char* name) {
  auto it = doc.find(name);
  if (it == doc.end()) throw DataError(std::string("model file lacks field '") + name + "'");
  return *it;
}

double number(const ordered_json& doc, const char* name) {
  const ordered_json& v = field(doc, name);
  if (!v.is_number()) throw DataError(std::string("model field '") + name + "' must be a number");
  return v.get<double>();
}

std::string text(const ordered_json& doc, const char* name) {
  const ordered_json& v = field(doc, name);
  if (!v.is_string()) throw DataError(std::string("model field '") + name + "' must be a string");
  return v.get<std::string>();
}

}  // namespace

std::string model_to_json(const ModelParams& model) {
  model.validate();
  ordered_json doc;
  doc["version"] = kModelFormatVersion;
  doc["method"] = to_string(model.method);
  doc["K"] = model.num_classes;
  doc["w"] = vec_json(model.w);
  doc["b"] = vec_json(model.b);
  doc["gamma"] = model.gamma;
  doc["p"] = model.p;
  if (std::isfinite(model.eps_g)) {
    doc["eps_g"] = model.eps_g;
  } else {
    doc["eps_g"] = nullptr;
  }
  doc["cap_scale"] = to_string(model.cap_scale);
  if (model.standardizer) {
    doc["standardizer"] = {{"means", vec_json(model.standardizer->means)},
                           {"scales", vec_json(model.standardizer->scales)}};
  } else {
    doc["standardizer"] = nullptr;
  }
  return doc.dump(2) + "\n";
}

ModelParams model_from_json(const std::string& content) {
  ordered_json doc;
  try {
    doc = ordered_json::parse(content);
  } catch (const ordered_json::parse_error& e) {
    throw DataError(std::string("model file is not valid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw DataError("model file must hold a JSON object");
  const ordered_json& version = field(doc, "version");
  if (!version.is_number_integer() || version.get<int>() != kModelFormatVersion) {
    throw DataError("unsupported model file version " + version.dump());
  }
  ModelParams m;
  try {
    m.method = parse_method(text(doc, "method"));
    m.cap_scale = parse_cap_scale(text(doc, "cap_scale"));
  } catch (const InvalidArgument& e) {
    throw DataError(e.what());
  }
  const ordered_json& k = field(doc, "K");
  if (!k.is_number_integer()) throw DataError("model field 'K' must be an integer");
  m.num_classes = k.get<int>();
  m.w = json_vec(field(doc, "w"), "w");
  m.b = json_vec(field(doc, "b"), "b");
  m.gamma = number(doc, "gamma");
  m.p = number(doc, "p");
  const ordered_json& eps = field(doc, "eps_g");
  if (eps.is_null()) {
    m.eps_g = std::numeric_limits<double>::infinity();
  } else if (eps.is_number()) {
    m.eps_g = eps.get<double>();
  } else {
    throw DataError("model field 'eps_g' must be a number or null");
  }
  const ordered_json& st = field(doc, "standardizer");
  if (!st.is_null()) {
    if (!st.is_object()) throw DataError("model field 'standardizer' must be an object or null");
    Standardizer s;
    s.means = json_vec(field(st, "means"), "means");
    s.scales = json_vec(field(st, "scales"), "scales");
    for (Eigen::Index i = 0; i < s.scales.size(); ++i) {
      if (!(s.scales(i) > 0.0)) throw DataError("standardizer scales must be positive");
    }
    m.standardizer = std::move(s);
  }
  try {
    m.validate();
  } catch (const InvalidArgument& e) {
    throw DataError(std::string("invalid model file: ") + e.what());
  }
  return m;
}

void save_model(const ModelParams& model, const std::string& path) {
  write_text_atomic(path, model_to_json(model));
}

ModelParams load_model(const std::string& path) { return model_from_json(read_text_file(path)); }

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_atomic(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  fs::path tmp = target;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("cannot write '" + tmp.string() + "'");
    out << content;
    out.flush();
    if (!out) {
      out.close();
      std::error_code ec;
      fs::remove(tmp, ec);
      throw DataError("failed writing '" + tmp.string() + "'");
    }
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw DataError("cannot rename into '" + path + "'");
  }
}

}  // namespace csvor
