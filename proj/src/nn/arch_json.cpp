#include "convshield/nn/arch_json.hpp"

#include <fstream>
#include <sstream>

#include "convshield/error.hpp"
#include "json.hpp"

namespace convshield::nn {

using nlohmann::json;

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};

json layer_to_json(const LayerSpec& layer) {
  return std::visit(
      Overloaded{[](const ConvLayerSpec& c) {
                   return json{{"type", "conv"},       {"in_channels", c.in_channels},
                               {"out_channels", c.out_channels}, {"kernel", c.kernel},
                               {"stride", c.stride},   {"padding", c.padding}};
                 },
                 [](const Activation& a) { return json{{"type", to_string(a.kind)}}; },
                 [](const GlobalPool& p) { return json{{"type", "pool"}, {"kind", to_string(p.kind)}}; },
                 [](const Upsample& u) {
                   return json{{"type", "upsample"}, {"mode", to_string(u.mode)}, {"scale", u.scale}};
                 },
                 [](const Linear& l) {
                   return json{{"type", "linear"}, {"in_features", l.in_features}, {"out_features", l.out_features}};
                 }},
      layer);
}

std::size_t get_count(const json& obj, const char* key, std::size_t index,
                      std::optional<std::size_t> fallback = std::nullopt) {
  const auto where = "layer " + std::to_string(index) + ": ";
  if (!obj.contains(key)) {
    if (fallback) return *fallback;
    throw InvalidArgument(where + "missing field \"" + key + "\"");
  }
  const json& v = obj.at(key);
  if (!v.is_number_integer() || v.get<long long>() < 0)
    throw InvalidArgument(where + "field \"" + key + "\" must be a non-negative integer");
  return v.get<std::size_t>();
}

std::string get_string(const json& obj, const char* key, std::size_t index) {
  if (!obj.contains(key) || !obj.at(key).is_string())
    throw InvalidArgument("layer " + std::to_string(index) + ": missing string field \"" + key + "\"");
  return obj.at(key).get<std::string>();
}

LayerSpec layer_from_json(const json& obj, std::size_t index) {
  if (!obj.is_object()) throw InvalidArgument("layer " + std::to_string(index) + " is not an object");
  const std::string type = get_string(obj, "type", index);
  if (type == "conv")
    return ConvLayerSpec{get_count(obj, "in_channels", index), get_count(obj, "out_channels", index),
                         get_count(obj, "kernel", index), get_count(obj, "stride", index, 1),
                         get_count(obj, "padding", index, 0)};
  if (type == "relu") return Activation{ActivationKind::kRelu};
  if (type == "identity") return Activation{ActivationKind::kIdentity};
  if (type == "pool") return GlobalPool{parse_pool_kind(get_string(obj, "kind", index))};
  if (type == "upsample")
    return Upsample{parse_upsample_mode(get_string(obj, "mode", index)), get_count(obj, "scale", index)};
  if (type == "linear")
    return Linear{get_count(obj, "in_features", index), get_count(obj, "out_features", index)};
  throw InvalidArgument("layer " + std::to_string(index) + ": unknown type \"" + type + "\"");
}

}  // namespace

std::string arch_to_json(const ArchSpec& arch, int indent) {
  json layers = json::array();
  for (const auto& layer : arch.layers) layers.push_back(layer_to_json(layer));
  json doc{{"layers", std::move(layers)}, {"stage_markers", arch.stage_markers}};
  return doc.dump(indent);
}

ArchSpec arch_from_json(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw InvalidArgument(std::string("malformed architecture JSON: ") + e.what());
  }
  if (!doc.is_object() || !doc.contains("layers") || !doc.at("layers").is_array())
    throw InvalidArgument("architecture JSON needs a \"layers\" array");
  ArchSpec arch;
  const json& layers = doc.at("layers");
  for (std::size_t i = 0; i < layers.size(); ++i) arch.layers.push_back(layer_from_json(layers[i], i));
  if (doc.contains("stage_markers")) {
    const json& markers = doc.at("stage_markers");
    if (!markers.is_array()) throw InvalidArgument("\"stage_markers\" must be an array");
    for (const json& m : markers) {
      if (!m.is_number_integer() || m.get<long long>() < 0)
        throw InvalidArgument("stage markers must be non-negative integers");
      arch.stage_markers.push_back(m.get<std::size_t>());
    }
  }
  validate(arch);
  return arch;
}

ArchSpec load_arch_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot open architecture file '" + path + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return arch_from_json(buffer.str());
}

}  // namespace convshield::nn
