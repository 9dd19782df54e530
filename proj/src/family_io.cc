#include "qcm/family_io.h"

#include <cctype>
#include <fstream>
#include <sstream>

#include "qcm/desync.h"
#include "qcm/errors.h"

namespace qcm {
namespace {

using nlohmann::json;

const json& field(const json& doc, const char* key) {
  if (!doc.is_object() || !doc.contains(key)) {
    throw ParseError(std::string("missing field \"") + key + "\"");
  }
  return doc.at(key);
}

int parse_dimension(const json& doc) {
  const json& n = field(doc, "n");
  if (!n.is_number_integer() || n.get<long long>() < 1 || n.get<long long>() > kMaxDimension) {
    throw ParseError("field \"n\" must be an integer in [1, " + std::to_string(kMaxDimension) + "]");
  }
  return n.get<int>();
}

NormTag parse_norm_field(const json& doc) {
  if (!doc.contains("norm")) return NormTag::kL1;
  const json& v = doc.at("norm");
  if (!v.is_string()) throw ParseError("field \"norm\" must be a string");
  const auto norm = parse_norm(v.get<std::string>());
  if (!norm) throw ParseError("unknown norm \"" + v.get<std::string>() + "\"");
  return *norm;
}

json parse_json(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("malformed document: ") + e.what());
  }
}

std::vector<double> parse_taus(const json& doc) {
  std::vector<double> taus;
  if (!doc.contains("taus")) return taus;
  const json& v = doc.at("taus");
  if (!v.is_array()) throw ParseError("field \"taus\" must be an array");
  for (const json& t : v) {
    if (!t.is_number()) throw ParseError("field \"taus\" must hold numbers");
    taus.push_back(t.get<double>());
  }
  return taus;
}

}  // namespace

Matrix parse_matrix(const json& value, int n, const std::string& what) {
  if (!value.is_array() || static_cast<int>(value.size()) != n) {
    throw ParseError(what + " must have " + std::to_string(n) + " rows");
  }
  Matrix m(n, n);
  for (int i = 0; i < n; ++i) {
    const json& row = value[static_cast<std::size_t>(i)];
    if (!row.is_array() || static_cast<int>(row.size()) != n) {
      throw ParseError(what + " row " + std::to_string(i) + " must have " + std::to_string(n) +
                       " entries");
    }
    for (int j = 0; j < n; ++j) {
      const json& e = row[static_cast<std::size_t>(j)];
      if (!e.is_number()) throw ParseError(what + " has a non-numeric entry");
      m(i, j) = e.get<double>();
    }
  }
  return m;
}

MatrixFamily parse_family(const json& doc) {
  const int n = parse_dimension(doc);
  const NormTag norm = parse_norm_field(doc);
  try {
    if (doc.contains("mixture_of")) {
      return mixture_family(parse_matrix(doc.at("mixture_of"), n, "mixture_of"), norm);
    }
    if (doc.contains("vertex_of")) {
      return vertex_family(parse_matrix(doc.at("vertex_of"), n, "vertex_of"), norm);
    }
    const json& list = field(doc, "matrices");
    if (!list.is_array() || list.empty()) throw ParseError("field \"matrices\" must be a nonempty array");
    std::vector<Matrix> members;
    for (std::size_t i = 0; i < list.size(); ++i) {
      members.push_back(parse_matrix(list[i], n, "matrix " + std::to_string(i)));
    }
    std::vector<std::string> labels;
    if (doc.contains("labels")) {
      const json& l = doc.at("labels");
      if (!l.is_array() || l.size() != members.size()) {
        throw ParseError("field \"labels\" must have one string per matrix");
      }
      for (const json& s : l) {
        if (!s.is_string()) throw ParseError("labels must be strings");
        labels.push_back(s.get<std::string>());
      }
    }
    return MatrixFamily(std::move(members), norm, std::move(labels));
  } catch (const InvalidArgument& e) {
    throw ParseError(e.what());
  }
}

MatrixFamily parse_family_text(const std::string& text) { return parse_family(parse_json(text)); }

std::optional<Matrix> mixture_source(const json& doc) {
  if (!doc.is_object() || !doc.contains("mixture_of")) return std::nullopt;
  return parse_matrix(doc.at("mixture_of"), parse_dimension(doc), "mixture_of");
}

GeneratorSpec parse_generator_text(const std::string& text) {
  const json doc = parse_json(text);
  const json& kind = field(doc, "generator");
  if (!kind.is_string()) throw ParseError("field \"generator\" must be a string");
  GeneratorSpec spec;
  spec.taus = parse_taus(doc);
  const std::string k = kind.get<std::string>();
  try {
    if (k == "affine") {
      const MatrixFamily base = parse_family(field(doc, "base"));
      const json& list = field(doc, "perturbation");
      if (!list.is_array()) throw ParseError("field \"perturbation\" must be an array");
      std::vector<Matrix> perturbation;
      for (std::size_t i = 0; i < list.size(); ++i) {
        perturbation.push_back(parse_matrix(list[i], base.dim(), "perturbation " + std::to_string(i)));
      }
      spec.generator = affine_generator(base, perturbation);
    } else if (k == "mixture") {
      const int n = parse_dimension(doc);
      spec.generator = mixture_generator(parse_matrix(field(doc, "A"), n, "A"),
                                         parse_matrix(field(doc, "B"), n, "B"),
                                         parse_norm_field(doc));
    } else if (k == "constant") {
      spec.generator = constant_generator(parse_family(field(doc, "base")));
    } else {
      throw ParseError("unknown generator \"" + k + "\"");
    }
  } catch (const InvalidArgument& e) {
    throw ParseError(e.what());
  }
  return spec;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::vector<double> parse_number_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception&) {
      throw ParseError("not a number: \"" + item + "\"");
    }
    while (used < item.size() && std::isspace(static_cast<unsigned char>(item[used]))) ++used;
    if (used != item.size()) throw ParseError("not a number: \"" + item + "\"");
    out.push_back(v);
  }
  return out;
}

Word parse_word(const std::string& text) {
  Word w;
  if (text.empty()) return w;
  for (double v : parse_number_list(text)) {
    if (v != static_cast<int>(v) || v < 0) throw ParseError("word entries must be nonnegative integers");
    w.push_back(static_cast<int>(v));
  }
  return w;
}

}  // namespace qcm
