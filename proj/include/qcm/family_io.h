#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "qcm/core.h"
#include "qcm/robustness.h"

namespace qcm {

/// Family document:
///   {"n": 2, "norm": "l1", "matrices": [[[..],[..]], ...], "labels": [..]}
/// Instead of "matrices" a document may give "mixture_of": A or
/// "vertex_of": A. All problems raise ParseError.
MatrixFamily parse_family(const nlohmann::json& doc);
MatrixFamily parse_family_text(const std::string& text);

/// The matrix A behind a "mixture_of" document, if any.
std::optional<Matrix> mixture_source(const nlohmann::json& doc);

Matrix parse_matrix(const nlohmann::json& value, int n, const std::string& what);

/// Generator document, one of
///   {"generator": "affine", "base": <family>, "perturbation": [B_1, ...], "taus": [...]}
///   {"generator": "mixture", "n": 2, "norm": "l1", "A": .., "B": .., "taus": [...]}
///   {"generator": "constant", "base": <family>, "taus": [...]}
/// "taus" is optional.
struct GeneratorSpec {
  FamilyGenerator generator;
  std::vector<double> taus;
};

GeneratorSpec parse_generator_text(const std::string& text);

std::string read_file(const std::string& path);

/// "1,0,-2" -> vector; ParseError on junk.
std::vector<double> parse_number_list(const std::string& text);
Word parse_word(const std::string& text);

}  // namespace qcm
