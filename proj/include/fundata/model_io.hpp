#pragma once

#include <filesystem>
#include <string>

#include "fundata/mfpca.hpp"

namespace fundata::pca {

/// Versioned JSON document holding every field of the model
/// ("format": "fundata-mfpca", "version": 1). Numbers keep full precision.
std::string model_to_json(const MfpcaModel& model);
MfpcaModel model_from_json(const std::string& text);

void save_model(const MfpcaModel& model, const std::filesystem::path& path);
MfpcaModel load_model(const std::filesystem::path& path);

}  // namespace fundata::pca
