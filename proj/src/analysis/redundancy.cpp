#include <map>

#include "convshield/analysis.hpp"
#include "convshield/error.hpp"

namespace convshield::analysis {

RedundancyProfile redundancy_profile(std::size_t scale, std::size_t kernel, std::size_t input_len) {
  require(scale >= 1, "redundancy: scale must be positive");
  require(kernel >= 1, "redundancy: kernel must be positive");
  require(input_len >= 1, "redundancy: input length must be positive");
  const std::size_t upsampled = scale * input_len;
  if (kernel > upsampled)
    throw InvalidArgument("redundancy: kernel " + std::to_string(kernel) +
                          " is larger than the upsampled input of length " + std::to_string(upsampled));

  RedundancyProfile profile{scale, kernel, input_len, upsampled - kernel + 1, 0, {}, {}};
  // Position t of the nearest-upsampled signal holds source sample t / scale,
  // so two outputs are equal for every filter iff they read the same sources.
  std::map<std::vector<std::size_t>, std::vector<std::size_t>> by_window;
  std::vector<std::vector<std::size_t>> order;
  for (std::size_t i = 0; i < profile.apparent_dims; ++i) {
    std::vector<std::size_t> window(kernel);
    for (std::size_t m = 0; m < kernel; ++m) window[m] = (i + m) / scale;
    auto& members = by_window[window];
    if (members.empty()) order.push_back(window);
    members.push_back(i + 1);
    profile.windows.push_back(std::move(window));
  }
  profile.distinct_dims = by_window.size();
  for (const auto& window : order) {
    const auto& members = by_window[window];
    if (members.size() >= 2) profile.duplicate_groups.push_back(members);
  }
  return profile;
}

}  // namespace convshield::analysis
