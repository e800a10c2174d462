#include "convshield/report.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

#include "convshield/error.hpp"
#include "convshield/nn/forward.hpp"
#include "json.hpp"

namespace convshield::report {

using Json = nlohmann::ordered_json;

Format parse_format(std::string_view name) {
  if (name == "json") return Format::kJson;
  if (name == "csv") return Format::kCsv;
  throw InvalidArgument("unknown format '" + std::string(name) + "' (expected json or csv)");
}

std::string csv_number(double value) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", value);
  return buf;
}

namespace {

std::string dump(const Json& doc) { return doc.dump(2) + "\n"; }

Json extent_json(nn::Extent e) { return Json::array({e.height, e.width}); }

class CsvWriter {
 public:
  explicit CsvWriter(std::initializer_list<std::string_view> header) { row(header); }

  template <class... Cells>
  void add(const Cells&... cells) {
    bool first = true;
    ((out_ << (first ? "" : ",") << cell(cells), first = false), ...);
    out_ << '\n';
  }

  std::string str() const { return out_.str(); }

 private:
  void row(std::initializer_list<std::string_view> cells) {
    bool first = true;
    for (auto c : cells) {
      out_ << (first ? "" : ",") << c;
      first = false;
    }
    out_ << '\n';
  }
  static std::string cell(double v) { return csv_number(v); }
  static std::string cell(std::string_view v) { return std::string(v); }
  static std::string cell(const std::string& v) { return v; }
  static std::string cell(const char* v) { return v; }
  template <class T>
    requires std::is_integral_v<T>
  static std::string cell(T v) {
    return std::to_string(v);
  }

  std::ostringstream out_;
};

}  // namespace

std::string render_dims(const nn::ArchSpec& arch, const Shape& input_shape, Format format) {
  const auto shapes = nn::infer_shapes(arch, input_shape);
  if (format == Format::kJson) {
    Json layers = Json::array();
    for (std::size_t i = 0; i < shapes.size(); ++i)
      layers.push_back({{"index", i},
                        {"type", nn::layer_type_name(arch.layers[i])},
                        {"layer", nn::describe(arch.layers[i])},
                        {"shape", shapes[i]}});
    return dump({{"input", input_shape}, {"layers", layers}});
  }
  CsvWriter csv{"index", "type", "shape"};
  for (std::size_t i = 0; i < shapes.size(); ++i)
    csv.add(i, nn::layer_type_name(arch.layers[i]), shape_to_string(shapes[i]));
  return csv.str();
}

std::string render(const analysis::RfReport& report, Format format) {
  if (format == Format::kJson) {
    Json entries = Json::array();
    for (const auto& e : report.entries)
      entries.push_back({{"conv_index", e.conv_index},
                         {"layer_index", e.layer_index},
                         {"receptive_field", e.receptive_field},
                         {"jump", e.jump},
                         {"feature", extent_json(e.feature)}});
    Json global = report.global_layer ? Json(*report.global_layer) : Json(nullptr);
    return dump({{"input", extent_json(report.input)}, {"global_layer", global}, {"layers", entries}});
  }
  CsvWriter csv{"conv_index", "layer_index", "receptive_field", "jump", "height", "width", "global"};
  for (const auto& e : report.entries)
    csv.add(e.conv_index, e.layer_index, e.receptive_field, e.jump, e.feature.height, e.feature.width,
            static_cast<int>(report.global_layer == e.conv_index));
  return csv.str();
}

std::string render(const analysis::CostReport& report, Format format) {
  if (format == Format::kJson) {
    Json layers = Json::array();
    for (const auto& l : report.layers)
      layers.push_back({{"index", l.layer_index},
                        {"type", l.type},
                        {"shape", l.output_shape},
                        {"flops", l.flops},
                        {"activation_memory_bytes", l.activation_memory_bytes},
                        {"param_count", l.param_count}});
    return dump({{"layers", layers},
                 {"totals",
                  {{"flops", report.total_flops},
                   {"activation_memory_bytes", report.total_activation_memory_bytes},
                   {"param_count", report.total_param_count},
                   {"param_bytes", report.total_param_bytes()},
                   {"memory_bytes", report.total_memory_bytes()}}}});
  }
  CsvWriter csv{"index", "type", "shape", "flops", "activation_memory_bytes", "param_count"};
  for (const auto& l : report.layers)
    csv.add(l.layer_index, l.type, shape_to_string(l.output_shape), l.flops, l.activation_memory_bytes,
            l.param_count);
  csv.add("total", "", "", report.total_flops, report.total_activation_memory_bytes, report.total_param_count);
  return csv.str();
}

std::string render(const analysis::RedundancyProfile& p, Format format) {
  // group id per output position: index of its distinct window, 1-based.
  std::vector<std::size_t> group(p.apparent_dims, 0);
  std::vector<std::size_t> group_size;
  {
    std::vector<std::vector<std::size_t>> seen;
    for (std::size_t i = 0; i < p.apparent_dims; ++i) {
      std::size_t g = 0;
      while (g < seen.size() && seen[g] != p.windows[i]) ++g;
      if (g == seen.size()) {
        seen.push_back(p.windows[i]);
        group_size.push_back(0);
      }
      group[i] = g + 1;
      ++group_size[g];
    }
  }
  if (format == Format::kJson) {
    return dump({{"scale", p.scale},
                 {"kernel", p.kernel},
                 {"input_len", p.input_len},
                 {"apparent_dims", p.apparent_dims},
                 {"distinct_dims", p.distinct_dims},
                 {"duplicate_groups", p.duplicate_groups},
                 {"windows", p.windows}});
  }
  CsvWriter csv{"position", "group", "group_size"};
  for (std::size_t i = 0; i < p.apparent_dims; ++i) csv.add(i + 1, group[i], group_size[group[i] - 1]);
  return csv.str();
}

std::string render(const bounds::BoundAnswer& a, Format format) {
  const auto pooling = nn::to_string(a.query.pooling);
  if (format == Format::kJson)
    return dump({{"pooling", pooling},
                 {"H", a.query.height},
                 {"W", a.query.width},
                 {"a", a.query.a},
                 {"b", a.query.b},
                 {"gamma", a.gamma},
                 {"p", a.p},
                 {"saturated", a.saturated}});
  CsvWriter csv{"pooling", "H", "W", "a", "b", "gamma", "p", "saturated"};
  csv.add(pooling, a.query.height, a.query.width, a.query.a, a.query.b, a.gamma, a.p,
          static_cast<int>(a.saturated));
  return csv.str();
}

std::string render(const experiments::InvarianceReport& report, Format format) {
  if (format == Format::kJson) {
    Json points = Json::array();
    for (const auto& p : report.points)
      points.push_back({{"epsilon", p.epsilon}, {"unchanged", p.unchanged}, {"total", p.total}, {"fraction", p.fraction}});
    return dump({{"points", points}});
  }
  CsvWriter csv{"epsilon", "unchanged", "total", "fraction"};
  for (const auto& p : report.points) csv.add(p.epsilon, p.unchanged, p.total, p.fraction);
  return csv.str();
}

std::string render(const experiments::LipschitzEstimate& e, Format format) {
  if (format == Format::kJson)
    return dump({{"lower_bound", e.lower_bound},
                 {"first", e.first},
                 {"second", e.second},
                 {"pairs_evaluated", e.pairs_evaluated}});
  CsvWriter csv{"lower_bound", "first", "second", "pairs_evaluated"};
  csv.add(e.lower_bound, e.first, e.second, e.pairs_evaluated);
  return csv.str();
}

std::string render(std::span<const experiments::DisturbanceReport> arms, Format format,
                   const DisturbanceOptions& options) {
  require(!arms.empty(), "no disturbance reports to render");
  const auto& first = arms.front();
  if (format == Format::kJson) {
    Json sizes = Json::array();
    for (const auto& s : first.sizes) sizes.push_back(extent_json(s.input));
    Json doc{{"experiment",
              {{"epsilon", first.epsilon},
               {"trials", first.trials},
               {"seed", first.base_seed},
               {"init", first.init.describe()},
               {"activation", nn::to_string(first.activation)},
               {"input_sizes", sizes}}}};
    Json arms_json = Json::array();
    for (const auto& report : arms) {
      Json size_list = Json::array();
      for (const auto& s : report.sizes) {
        Json layers = Json::array();
        for (const auto& l : s.layers)
          layers.push_back({{"index", l.layer_index},
                            {"layer", l.layer},
                            {"median", l.median},
                            {"mean", l.mean},
                            {"max", l.max},
                            {"a", l.a},
                            {"b", l.b}});
        Json pooled{{"median", s.pooled_median}, {"mean", s.pooled_mean}, {"max", s.pooled_max}};
        Json change{{"median", s.output_change_median},
                    {"mean", s.output_change_mean},
                    {"max", s.output_change_max}};
        if (options.include_samples) {
          pooled["samples"] = s.pooled;
          change["samples"] = s.output_change;
        }
        if (options.include_per_channel) pooled["per_channel"] = s.pooled_per_channel;
        size_list.push_back({{"input", extent_json(s.input)},
                             {"feature", extent_json(s.feature)},
                             {"channels", s.channels},
                             {"a", s.a},
                             {"b", s.b},
                             {"pooled", pooled},
                             {"output_change", change},
                             {"layers", layers}});
      }
      arms_json.push_back({{"pooling", nn::to_string(report.pooling)}, {"sizes", size_list}});
    }
    doc["arms"] = arms_json;
    return dump(doc);
  }

  CsvWriter csv{"pooling", "input_h", "input_w", "layer", "layer_type", "statistic", "trial", "channel", "value"};
  for (const auto& report : arms) {
    const auto pooling = nn::to_string(report.pooling);
    for (const auto& s : report.sizes) {
      const auto h = s.input.height, w = s.input.width;
      for (const auto& l : s.layers) {
        const std::string idx = std::to_string(l.layer_index);
        for (auto [name, value] : {std::pair{"median", l.median}, {"mean", l.mean}, {"max", l.max},
                                   {"a", l.a}, {"b", l.b}})
          csv.add(pooling, h, w, idx, l.layer, name, "", "", value);
      }
      auto emit = [&](const char* layer, double med, double avg, double mx, const std::vector<double>& samples) {
        for (auto [name, value] : {std::pair{"median", med}, {"mean", avg}, {"max", mx}})
          csv.add(pooling, h, w, layer, pooling, name, "", "", value);
        if (options.include_samples)
          for (std::size_t t = 0; t < samples.size(); ++t)
            csv.add(pooling, h, w, layer, pooling, "sample", t, "", samples[t]);
      };
      emit("pooled", s.pooled_median, s.pooled_mean, s.pooled_max, s.pooled);
      csv.add(pooling, h, w, "pooled", pooling, "a", "", "", s.a);
      csv.add(pooling, h, w, "pooled", pooling, "b", "", "", s.b);
      emit("output_change", s.output_change_median, s.output_change_mean, s.output_change_max,
           s.output_change);
      if (options.include_per_channel)
        for (std::size_t t = 0; t < s.pooled.size(); ++t)
          for (std::size_t c = 0; c < s.channels; ++c)
            csv.add(pooling, h, w, "pooled", pooling, "channel_sample", t, c,
                    s.pooled_per_channel[t * s.channels + c]);
    }
  }
  return csv.str();
}

}  // namespace convshield::report
