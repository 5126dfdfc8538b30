#pragma once

#include <string>

#include <json.hpp>

#include "qclip/hybrid.hpp"
#include "qclip/train.hpp"

namespace qclip::json_io {

using nlohmann::json;

json load_json_file(const std::string& path);

// Complex matrices serialize as nested arrays of [re, im] pairs, row-major.
json matrix_to_json(const ComplexMatrix& m);
ComplexMatrix matrix_from_json(const json& j);

json circuit_to_json(const quantum::CircuitSpec& c);
quantum::CircuitSpec circuit_from_json(const json& j);

json densenet_to_json(const classical::DenseNet& net);
classical::DenseNet densenet_from_json(const json& j);

json hybrid_to_json(const hybrid::HybridModel& m);
hybrid::HybridModel hybrid_from_json(const json& j);

train::MetricsLog metrics_from_csv(const std::string& path);

}  // namespace qclip::json_io
