#include "wecon/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace wecon {

std::string format_double(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

void write_instances(const std::string& path, const std::vector<Instance>& instances) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    for (const Instance& inst : instances) {
        out << "MOCOP " << kind_name(inst.kind) << ' ' << inst.n << ' ' << inst.kappa << '\n';
        for (int i = 0; i < inst.features.rows; ++i) {
            for (int j = 0; j < inst.features.cols; ++j) {
                if (j) out << ' ';
                out << format_double(inst.features.at(i, j));
            }
            out << '\n';
        }
        if (inst.has_capacity()) out << "CAPACITY " << format_double(inst.capacity) << '\n';
    }
    if (!out) throw std::runtime_error("write failed: " + path);
}

std::vector<Instance> read_instances(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read " + path);
    std::vector<Instance> out;
    std::string line;
    int block = 0;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream head(line);
        std::string tag, kind_s;
        int n = 0, kappa = 0;
        head >> tag >> kind_s >> n >> kappa;
        if (tag != "MOCOP" || head.fail())
            throw std::runtime_error(path + ": expected 'MOCOP <kind> <n> <kappa>', got '" +
                                     line + "'");
        Instance inst;
        inst.kind = kind_from_name(kind_s);
        inst.n = n;
        inst.kappa = kappa;
        inst.id = path + "#" + std::to_string(block++);
        inst.features = Matrix<double>(inst.node_count(), feature_width(inst.kind));
        for (int i = 0; i < inst.features.rows; ++i) {
            if (!std::getline(in, line))
                throw std::runtime_error(path + ": truncated feature table");
            std::istringstream row(line);
            for (int j = 0; j < inst.features.cols; ++j)
                if (!(row >> inst.features.at(i, j)))
                    throw std::runtime_error(path + ": bad feature row '" + line + "'");
        }
        if (inst.has_capacity()) {
            if (!std::getline(in, line)) throw std::runtime_error(path + ": missing CAPACITY");
            std::istringstream cap(line);
            std::string ctag;
            cap >> ctag >> inst.capacity;
            if (ctag != "CAPACITY" || cap.fail())
                throw std::runtime_error(path + ": expected 'CAPACITY <value>', got '" + line +
                                         "'");
        }
        inst.validate();
        out.push_back(std::move(inst));
    }
    return out;
}

namespace {

struct TsplibFile {
    std::vector<std::pair<double, double>> coords;
};

TsplibFile parse_tsplib(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read " + path);
    TsplibFile f;
    std::string line;
    bool in_coords = false;
    while (std::getline(in, line)) {
        std::istringstream ss(line);
        std::string first;
        ss >> first;
        if (first.empty()) continue;
        if (first == "NODE_COORD_SECTION") {
            in_coords = true;
            continue;
        }
        if (first == "EOF") break;
        if (!in_coords) continue;
        double x = 0, y = 0;
        std::istringstream row(line);
        long long idx = 0;
        if (!(row >> idx >> x >> y))
            throw std::runtime_error(path + ": bad NODE_COORD_SECTION row '" + line + "'");
        f.coords.emplace_back(x, y);
    }
    if (f.coords.empty())
        throw std::runtime_error(path + ": no NODE_COORD_SECTION data");
    return f;
}

}  // namespace

Instance load_tsplib_pair(const std::vector<std::string>& paths, const std::string& id) {
    if (paths.size() != 2 && paths.size() != 3)
        throw std::invalid_argument("load_tsplib_pair: need two or three files");
    std::vector<TsplibFile> files;
    for (const auto& p : paths) files.push_back(parse_tsplib(p));
    const std::size_t n = files[0].coords.size();
    for (std::size_t i = 1; i < files.size(); ++i)
        if (files[i].coords.size() != n)
            throw std::runtime_error("load_tsplib_pair: node counts differ (" +
                                     std::to_string(n) + " vs " +
                                     std::to_string(files[i].coords.size()) + ")");
    Instance inst;
    inst.kind = paths.size() == 2 ? ProblemKind::BiTSP : ProblemKind::TriTSP;
    inst.n = static_cast<int>(n);
    inst.kappa = static_cast<int>(paths.size());
    inst.id = id.empty() ? paths[0] : id;
    inst.features = Matrix<double>(inst.n, 2 * inst.kappa);
    for (std::size_t k = 0; k < files.size(); ++k) {
        double mx = 0.0;
        for (const auto& [x, y] : files[k].coords) mx = std::max({mx, x, y});
        if (!(mx > 0.0)) throw std::runtime_error("load_tsplib_pair: degenerate coordinates");
        for (std::size_t i = 0; i < n; ++i) {
            inst.features.at(static_cast<int>(i), 2 * static_cast<int>(k)) =
                files[k].coords[i].first / mx;
            inst.features.at(static_cast<int>(i), 2 * static_cast<int>(k) + 1) =
                files[k].coords[i].second / mx;
        }
    }
    inst.validate();
    return inst;
}

std::map<std::string, std::string> read_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read config " + path);
    std::map<std::string, std::string> kv;
    std::string line;
    while (std::getline(in, line)) {
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        const auto strip = [](std::string s) {
            const auto b = s.find_first_not_of(" \t\r");
            const auto e = s.find_last_not_of(" \t\r");
            return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
        };
        line = strip(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::runtime_error(path + ": expected key=value, got '" + line + "'");
        kv[strip(line.substr(0, eq))] = strip(line.substr(eq + 1));
    }
    return kv;
}

void write_points_csv(const std::string& path, const std::vector<std::vector<double>>& points) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    const std::size_t k = points.empty() ? 2 : points[0].size();
    for (std::size_t j = 0; j < k; ++j) out << (j ? ",f" : "f") << (j + 1);
    out << '\n';
    for (const auto& p : points) {
        for (std::size_t j = 0; j < p.size(); ++j) {
            if (j) out << ',';
            out << format_double(p[j]);
        }
        out << '\n';
    }
}

std::vector<std::vector<double>> read_points_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read " + path);
    std::vector<std::vector<double>> pts;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<double> row;
        std::stringstream ss(line);
        std::string cell;
        bool numeric = true;
        while (std::getline(ss, cell, ',')) {
            char* end = nullptr;
            const double v = std::strtod(cell.c_str(), &end);
            if (end == cell.c_str()) {
                numeric = false;
                break;
            }
            row.push_back(v);
        }
        if (!numeric) continue;  // header line
        if (!row.empty()) pts.push_back(std::move(row));
    }
    return pts;
}

}  // namespace wecon
