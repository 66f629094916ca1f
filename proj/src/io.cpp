#include "rgm/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace rgm::io {

namespace {

std::ifstream open_in(const Path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open for reading: " + path.string());
    return in;
}

std::ofstream open_out(const Path& path) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path);
    if (!out) throw IoError("cannot open for writing: " + path.string());
    return out;
}

double parse_double(const std::string& tok, const Path& path) {
    try {
        size_t pos = 0;
        const double v = std::stod(tok, &pos);
        if (pos != tok.size()) throw std::invalid_argument(tok);
        return v;
    } catch (const std::exception&) {
        throw IoError("bad numeric token '" + tok + "' in " + path.string());
    }
}

}  // namespace

std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void write_block_file(const Path& path, const BlockFile& file) {
    auto out = open_out(path);
    out << file.m << ' ' << file.N;
    if (file.n >= 0) out << ' ' << file.n;
    out << '\n';
    for (const auto& [k, v] : file.metadata) out << "# " << k << ' ' << v << '\n';
    for (const auto& block : file.blocks) {
        out << '\n';
        for (int i = 0; i < block.rows(); ++i) {
            for (int j = 0; j < block.cols(); ++j) {
                if (j) out << ' ';
                out << fmt_double(block(i, j));
            }
            out << '\n';
        }
    }
    if (!out) throw IoError("write failed: " + path.string());
}

BlockFile read_block_file(const Path& path) {
    auto in = open_in(path);
    BlockFile file;

    std::string line;
    if (!std::getline(in, line)) throw IoError("empty block file: " + path.string());
    {
        std::istringstream hs(line);
        if (!(hs >> file.m >> file.N)) throw IoError("bad header in " + path.string());
        if (!(hs >> file.n)) file.n = -1;
    }
    if (file.m < 1) throw IoError("bad block size in " + path.string());

    std::vector<double> values;
    while (std::getline(in, line)) {
        std::istringstream ls(line);
        std::string tok;
        ls >> tok;
        if (tok.empty()) continue;
        if (tok == "#") {
            std::string key, value;
            ls >> key;
            std::getline(ls, value);
            const auto pos = value.find_first_not_of(" \t");
            file.metadata[key] = pos == std::string::npos ? "" : value.substr(pos);
            continue;
        }
        values.push_back(parse_double(tok, path));
        while (ls >> tok) values.push_back(parse_double(tok, path));
    }

    const size_t per_block = static_cast<size_t>(file.m) * file.m;
    if (per_block == 0 || values.size() % per_block != 0) {
        throw IoError("block data not a multiple of m*m in " + path.string());
    }
    for (size_t b = 0; b * per_block < values.size(); ++b) {
        Matrix block(file.m, file.m);
        for (int i = 0; i < file.m; ++i) {
            for (int j = 0; j < file.m; ++j) {
                block(i, j) = values[b * per_block + static_cast<size_t>(i * file.m + j)];
            }
        }
        file.blocks.push_back(std::move(block));
    }
    return file;
}

void write_circulant(const Path& path, const BlockCirculant& C, const Metadata& meta) {
    write_block_file(path, BlockFile{C.m(), C.N(), -1, meta, C.blocks()});
}

BlockCirculant read_circulant(const Path& path) {
    BlockFile f = read_block_file(path);
    try {
        return BlockCirculant(f.m, f.N, std::move(f.blocks));
    } catch (const std::invalid_argument& e) {
        throw IoError(std::string(e.what()) + " in " + path.string());
    }
}

void write_banded(const Path& path, const BandedBlockCirculant& B, const Metadata& meta) {
    write_block_file(path, BlockFile{B.m(), B.N(), B.band(), meta, B.blocks()});
}

BandedBlockCirculant read_banded(const Path& path, Metadata& meta_out) {
    BlockFile f = read_block_file(path);
    if (f.n < 0) throw IoError("banded file missing bandwidth in header: " + path.string());
    meta_out = std::move(f.metadata);
    try {
        return BandedBlockCirculant(f.m, f.N, f.n, std::move(f.blocks));
    } catch (const std::invalid_argument& e) {
        throw IoError(std::string(e.what()) + " in " + path.string());
    }
}

BandedBlockCirculant read_banded(const Path& path) {
    Metadata meta;
    return read_banded(path, meta);
}

void write_ar_model(const Path& path, const ARModel& model) {
    model.validate();
    BlockFile f;
    f.m = model.m;
    f.N = 0;
    f.n = model.n;
    f.metadata["kind"] = "ar-model";
    f.metadata["poles-checked"] = is_stable(model) ? "1" : "0";
    f.blocks = model.coeffs;
    f.blocks.push_back(model.innovation);
    write_block_file(path, f);
}

ARModel read_ar_model(const Path& path) {
    BlockFile f = read_block_file(path);
    if (f.n < 0 || static_cast<int>(f.blocks.size()) != f.n + 2) {
        throw IoError("AR model file needs n + 2 blocks: " + path.string());
    }
    ARModel model;
    model.m = f.m;
    model.n = f.n;
    model.innovation = f.blocks.back();
    f.blocks.pop_back();
    model.coeffs = std::move(f.blocks);
    try {
        model.validate();
    } catch (const std::invalid_argument& e) {
        throw IoError(std::string(e.what()) + " in " + path.string());
    }
    return model;
}

void write_samples_csv(const Path& path, const Matrix& samples) {
    auto out = open_out(path);
    for (int i = 0; i < samples.rows(); ++i) {
        for (int j = 0; j < samples.cols(); ++j) {
            if (j) out << ',';
            out << fmt_double(samples(i, j));
        }
        out << '\n';
    }
    if (!out) throw IoError("write failed: " + path.string());
}

Matrix read_samples_csv(const Path& path) {
    auto in = open_in(path);
    std::vector<std::vector<double>> rows;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<double> row;
        std::istringstream ls(line);
        std::string cell;
        while (std::getline(ls, cell, ',')) row.push_back(parse_double(cell, path));
        if (!rows.empty() && row.size() != rows.front().size()) {
            throw IoError("ragged CSV in " + path.string());
        }
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw IoError("empty CSV: " + path.string());
    Matrix M(static_cast<long>(rows.size()), static_cast<long>(rows.front().size()));
    for (size_t i = 0; i < rows.size(); ++i) {
        for (size_t j = 0; j < rows[i].size(); ++j) {
            M(static_cast<long>(i), static_cast<long>(j)) = rows[i][j];
        }
    }
    return M;
}

void write_edges(const Path& path, const SupportPattern& support) {
    auto out = open_out(path);
    for (const auto& [i, j] : support.offdiag_pairs()) {
        out << (i + 1) << ' ' << (j + 1) << '\n';
    }
    if (!out) throw IoError("write failed: " + path.string());
}

SupportPattern read_edges(const Path& path, int m) {
    auto in = open_in(path);
    SupportPattern support(m);
    std::string line;
    while (std::getline(in, line)) {
        std::istringstream ls(line);
        int i = 0, j = 0;
        if (!(ls >> i)) continue;
        if (!(ls >> j)) throw IoError("bad edge line in " + path.string());
        if (i < 1 || j < 1 || i > m || j > m) throw IoError("edge out of range in " + path.string());
        support.add(i - 1, j - 1);
    }
    return support;
}

void write_keyvalues(const Path& path,
                     const std::vector<std::pair<std::string, std::string>>& kv) {
    auto out = open_out(path);
    for (const auto& [k, v] : kv) out << k << " = " << v << '\n';
    if (!out) throw IoError("write failed: " + path.string());
}

std::map<std::string, std::string> read_keyvalues(const Path& path) {
    auto in = open_in(path);
    std::map<std::string, std::string> kv;
    std::string line;
    while (std::getline(in, line)) {
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        const auto eq = line.find('=');
        if (eq == std::string::npos) continue;
        auto trim = [](std::string s) {
            const auto a = s.find_first_not_of(" \t\r");
            const auto b = s.find_last_not_of(" \t\r");
            return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
        };
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (!key.empty()) kv[key] = value;
    }
    return kv;
}

}  // namespace rgm::io
