#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>

#include "ns/fit.hpp"

namespace ns {

/// Versioned model-descriptor document: the serialized form of a FitResult
/// plus the fit window it was computed on and, when known, the generating
/// scenario (which enables self-checking predictions downstream).
struct ModelDescriptor {
    FitResult result;
    double t_start = 0.0;
    double t_end = 0.0;
    double sample_rate = 0.0;
    std::optional<std::map<std::string, std::string>> provenance;  // scenario key-values
};

/// JSON with canonical field order; doubles round-trip losslessly.
std::string to_json(const ModelDescriptor& descriptor);
ModelDescriptor model_from_json(std::string_view json);

}  // namespace ns
