#include "nskm/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>

namespace nskm {

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

bool parse_double(std::string_view text, double& out) {
    text = trim(text);
    if (text.empty()) return false;
    if (text.front() == '+') text.remove_prefix(1);
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), out);
    return ec == std::errc() && ptr == text.data() + text.size();
}

std::vector<std::string_view> split_commas(std::string_view line) {
    std::vector<std::string_view> cells;
    std::size_t start = 0;
    for (;;) {
        const std::size_t comma = line.find(',', start);
        if (comma == std::string_view::npos) {
            cells.push_back(line.substr(start));
            return cells;
        }
        cells.push_back(line.substr(start, comma - start));
        start = comma + 1;
    }
}

std::ifstream open_input(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    return in;
}

}  // namespace

std::vector<std::vector<double>> parse_csv(std::istream& in) {
    std::vector<std::vector<double>> rows;
    std::string line;
    std::size_t line_number = 0;
    bool first_content_line = true;
    while (std::getline(in, line)) {
        ++line_number;
        std::string_view view = trim(line);
        if (line_number == 1 && view.size() >= 3 && view.substr(0, 3) == "\xEF\xBB\xBF") view.remove_prefix(3);
        if (view.empty()) continue;
        const auto cells = split_commas(view);
        std::vector<double> row(cells.size());
        bool numeric = true;
        std::size_t bad_column = 0;
        for (std::size_t c = 0; c < cells.size(); ++c) {
            if (!parse_double(cells[c], row[c]) || !std::isfinite(row[c])) {
                numeric = false;
                bad_column = c + 1;
                break;
            }
        }
        if (!numeric) {
            if (first_content_line) {
                first_content_line = false;
                continue;  // header
            }
            std::ostringstream msg;
            msg << "non-numeric cell at (" << line_number << "," << bad_column << ")";
            throw std::runtime_error(msg.str());
        }
        first_content_line = false;
        if (!rows.empty() && row.size() != rows.front().size()) {
            std::ostringstream msg;
            msg << "row " << line_number << " has " << row.size() << " columns, expected " << rows.front().size();
            throw std::runtime_error(msg.str());
        }
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw std::runtime_error("dataset has no numeric rows");
    return rows;
}

std::vector<std::vector<double>> load_dataset(const std::filesystem::path& path) {
    auto in = open_input(path);
    return parse_csv(in);
}

GraphInstance parse_graph_instance(std::istream& in) {
    GraphInstance instance;
    std::string line;
    std::size_t line_number = 0;
    bool have_header = false;
    std::vector<char> seen;
    auto fail = [&](const std::string& what) {
        std::ostringstream msg;
        msg << "graph instance line " << line_number << ": " << what;
        throw std::runtime_error(msg.str());
    };
    while (std::getline(in, line)) {
        ++line_number;
        const std::string_view view = trim(line);
        if (view.empty() || view.front() == '#') continue;
        std::istringstream fields{std::string(view)};
        std::string keyword;
        fields >> keyword;
        if (keyword == "nodes") {
            if (have_header) fail("duplicate 'nodes' line");
            std::size_t n = 0;
            if (!(fields >> n) || n == 0) fail("expected 'nodes N' with N >= 1");
            instance.graph.nodes = n;
            instance.probabilities.assign(n, 0.0);
            seen.assign(n, 0);
            have_header = true;
        } else if (keyword == "node") {
            if (!have_header) fail("'node' before 'nodes'");
            std::size_t id = 0;
            double p = 0.0;
            if (!(fields >> id >> p)) fail("expected 'node <id> <probability>'");
            if (id >= instance.graph.nodes) fail("node id out of range");
            if (seen[id]) fail("node listed twice");
            if (!(p >= 0.0) || !std::isfinite(p)) fail("probability must be nonnegative");
            seen[id] = 1;
            instance.probabilities[id] = p;
        } else if (keyword == "edge") {
            if (!have_header) fail("'edge' before 'nodes'");
            Edge e;
            if (!(fields >> e.a >> e.b >> e.weight)) fail("expected 'edge <i> <j> <weight>'");
            instance.graph.edges.push_back(e);
        } else {
            fail("unknown keyword '" + keyword + "'");
        }
    }
    if (!have_header) throw std::runtime_error("graph instance has no 'nodes' line");
    for (std::size_t i = 0; i < seen.size(); ++i)
        if (!seen[i]) throw std::runtime_error("graph instance is missing 'node " + std::to_string(i) + "'");
    double total = 0.0;
    for (double p : instance.probabilities) total += p;
    if (std::abs(total - 1.0) > 1e-9) {
        std::ostringstream msg;
        msg.precision(17);
        msg << "graph instance probabilities sum to " << total << ", expected 1";
        throw std::runtime_error(msg.str());
    }
    return instance;
}

GraphInstance load_graph_instance(const std::filesystem::path& path) {
    auto in = open_input(path);
    return parse_graph_instance(in);
}

void write_graph_instance(std::ostream& out, const GraphInstance& instance) {
    const auto old_precision = out.precision(17);
    out << "nodes " << instance.graph.nodes << '\n';
    for (std::size_t i = 0; i < instance.graph.nodes; ++i) out << "node " << i << ' ' << instance.probabilities[i] << '\n';
    for (const auto& e : instance.graph.edges) out << "edge " << e.a << ' ' << e.b << ' ' << e.weight << '\n';
    out.precision(old_precision);
}

bool looks_like_graph_instance(const std::filesystem::path& path) {
    std::ifstream in(path);
    std::string line;
    while (std::getline(in, line)) {
        const std::string_view view = trim(line);
        if (view.empty() || view.front() == '#') continue;
        return view.substr(0, 5) == "nodes";
    }
    return false;
}

}  // namespace nskm
