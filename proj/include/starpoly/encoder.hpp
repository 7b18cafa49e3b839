#pragma once

// Ground-truth encoding of a label image into dense maps.

#include <vector>

#include "starpoly/model.hpp"

namespace starpoly {

/// Squared Euclidean distance from each object pixel to the nearest pixel that
/// does not belong to the same object (another instance, background, or
/// anything outside the image). Exact integers; 0 on background.
std::vector<std::int64_t> squared_distance_to_background(const LabelImage& labels);

/// sqrt of squared_distance_to_background; 0 on background.
std::vector<double> distance_to_background(const LabelImage& labels);

/// Per-object normalized distance to background; each object's maximum is 1.
std::vector<float> object_probabilities(const LabelImage& labels);

/// Radial distance along ray k from foreground pixel (row, col): the number of
/// unit steps until the rounded lookup position leaves the object or the image.
/// Returns 0 for background pixels.
int cast_ray(const LabelImage& labels, int row, int col, const Direction& dir);

/// n distance planes (ray-major) for every pixel.
std::vector<float> star_distances(const LabelImage& labels, const RadialGeometry& geometry);

DenseMaps encode(const LabelImage& labels, const RadialGeometry& geometry);

}  // namespace starpoly
