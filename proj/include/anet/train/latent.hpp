#pragma once

#include <iosfwd>

#include "anet/model/adaptivenet.hpp"

namespace anet::train {

struct LatentRow {
  bool is_med = false;
  Vec z;
};

// One latent vector per event across all samples, in sample order (visits
// before medications within a sample).
std::vector<LatentRow> collect_latents(const model::AdaptiveNet& model,
                                       std::span<const sample::StructuredSample> samples);

// CSV: event_type tag column plus the F latent coordinates.
void write_latents_csv(std::ostream& out, std::span<const LatentRow> rows);

// Held-out accuracy of a closed-form least-squares linear classifier
// separating visit from medication latents; 0.5 is chance level.
double latent_separability(std::span<const LatentRow> rows, std::uint64_t seed = 0);

}  // namespace anet::train
