#pragma once

#include <string>

#include "csvor/model.hpp"

namespace csvor {

inline constexpr int kModelFormatVersion = 1;

/// Versioned JSON document. Doubles are written in shortest round-trip form,
/// so reading the text back reproduces every bit. An infinite eps_g is null.
std::string model_to_json(const ModelParams& model);

/// Throws DataError on malformed documents or unsupported versions.
ModelParams model_from_json(const std::string& text);

void save_model(const ModelParams& model, const std::string& path);
ModelParams load_model(const std::string& path);

/// Whole-file read; DataError when the file cannot be opened.
std::string read_text_file(const std::string& path);

/// Writes to a sibling temp file and renames it over `path`.
void write_text_atomic(const std::string& path, const std::string& content);

}  // namespace csvor
