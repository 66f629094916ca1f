#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "rgm/ar_process.hpp"
#include "rgm/block_circulant.hpp"
#include "rgm/support.hpp"

namespace rgm::io {

using Path = std::filesystem::path;
using Metadata = std::map<std::string, std::string>;

/// Shortest round-trip decimal representation at 17 significant digits.
std::string fmt_double(double v);

/// Shared block-sequence text format: a header line `m N n?`, optional
/// `# key value` metadata lines, then one m x m block per stanza in row-major
/// order, full double precision.
struct BlockFile {
    int m = 0;
    int N = 0;
    int n = -1;  // -1 when the header has no bandwidth field
    Metadata metadata;
    std::vector<Matrix> blocks;
};

void write_block_file(const Path& path, const BlockFile& file);
BlockFile read_block_file(const Path& path);

void write_circulant(const Path& path, const BlockCirculant& C, const Metadata& meta = {});
BlockCirculant read_circulant(const Path& path);

void write_banded(const Path& path, const BandedBlockCirculant& B, const Metadata& meta = {});
BandedBlockCirculant read_banded(const Path& path);
BandedBlockCirculant read_banded(const Path& path, Metadata& meta_out);

/// AR models use the same stanza format with header `m 0 n`, the n + 1
/// coefficient blocks followed by the innovation covariance, and a
/// `poles-checked` metadata flag.
void write_ar_model(const Path& path, const ARModel& model);
ARModel read_ar_model(const Path& path);

void write_samples_csv(const Path& path, const Matrix& samples);
Matrix read_samples_csv(const Path& path);

/// Edge lists: one `i j` per line, 1-based, i < j; diagonal pairs implicit.
void write_edges(const Path& path, const SupportPattern& support);
SupportPattern read_edges(const Path& path, int m);

/// Flat `key = value` reports, written in the given order.
void write_keyvalues(const Path& path, const std::vector<std::pair<std::string, std::string>>& kv);
std::map<std::string, std::string> read_keyvalues(const Path& path);

}  // namespace rgm::io
