#pragma once

#include <string>

#include "kdesketch/dp.hpp"
#include "kdesketch/imq.hpp"
#include "kdesketch/kde.hpp"

namespace kdesketch {

// Little-endian binary formats.
//
// Dataset (.kds): magic "KDS1", u32 version, u64 n, u64 d, f64 sigma,
// f64 delta_bound, then n*d f64 row-major.
//
// Sketch (.ksk): magic "KSK1", u32 version, u8 method, u8 kernel
// (0 = gaussian, 1 = imq), u8 flags (bit0 = dp), u8 reserved, a common
// header (n, d, sigma, delta_bound, epsilon, delta, labeled seed table,
// labeled scalar table), then the flavor payload: the mean feature vector,
// the exp-sum block plus nested bank records (imq), or the privacy block
// plus the noised mean (dp).

void write_dataset(const std::string& path, const Dataset& data);
Dataset read_dataset(const std::string& path);

void write_sketch(const std::string& path, const KdeSketch& sketch);
void write_sketch(const std::string& path, const ImqSketch& sketch);
void write_sketch(const std::string& path, const DpSketch& sketch);

struct SketchFile {
    enum class Kind { Gaussian, Imq, Dp } kind = Kind::Gaussian;
    KdeSketch gaussian;
    ImqSketch imq;
    DpSketch dp;
};

SketchFile read_sketch_file(const std::string& path);

}  // namespace kdesketch
