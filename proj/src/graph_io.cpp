#include "fairpath/graph_io.hpp"

#include <array>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>

namespace fairpath {

namespace {

using M = EndpointMark;

struct Token {
    std::string_view text;
    M left;
    M right;
};

constexpr std::array<Token, 9> kTokens{{
    {"->", M::Tail, M::Arrow},
    {"<-", M::Arrow, M::Tail},
    {"--", M::Tail, M::Tail},
    {"o-o", M::Circle, M::Circle},
    {"o->", M::Circle, M::Arrow},
    {"<-o", M::Arrow, M::Circle},
    {"<->", M::Arrow, M::Arrow},
    {"-o", M::Tail, M::Circle},
    {"o-", M::Circle, M::Tail},
}};

std::optional<Token> lookup(std::string_view word) {
    for (const auto& t : kTokens)
        if (t.text == word) return t;
    return std::nullopt;
}

bool looks_like_mark(std::string_view w) {
    if (w.size() > 4 || w.find_first_of("-=") == std::string_view::npos) return false;
    return w.find_first_not_of("<>-=o*x") == std::string_view::npos;
}

std::vector<std::string> split_words(const std::string& line) {
    std::istringstream in(line);
    std::vector<std::string> words;
    for (std::string w; in >> w;) words.push_back(w);
    return words;
}

std::string join(const std::vector<std::string>& words, std::size_t from, std::size_t to) {
    std::string out;
    for (std::size_t i = from; i < to; ++i) {
        if (!out.empty()) out += ' ';
        out += words[i];
    }
    return out;
}

[[noreturn]] void fail(std::size_t line_no, const std::string& what) {
    throw std::invalid_argument("graph parse error at line " + std::to_string(line_no) + ": " + what);
}

}  // namespace

MixedGraph parse_graph(std::string_view text) {
    struct RawEdge {
        std::string a, b;
        M mark_a, mark_b;
        std::size_t line;
    };
    std::vector<std::string> names;
    std::map<std::string, std::size_t> index;
    std::vector<RawEdge> raw_edges;

    auto intern = [&](const std::string& name, std::size_t line_no) {
        const auto key = normalize_name(name);
        if (key.empty()) fail(line_no, "empty node name");
        if (!index.contains(key)) {
            index.emplace(key, names.size());
            names.push_back(name);
        }
    };

    std::istringstream in{std::string(text)};
    std::size_t line_no = 0;
    for (std::string line; std::getline(in, line);) {
        ++line_no;
        const auto words = split_words(line);
        if (words.empty() || words.front().starts_with('#')) continue;
        std::optional<std::size_t> at;
        for (std::size_t i = 0; i < words.size(); ++i)
            if (lookup(words[i])) {
                if (at) fail(line_no, "more than one edge symbol");
                at = i;
            }
        if (!at) {
            // A lone name declares a node; anything that looks like a mark is an error.
            for (const auto& w : words)
                if (looks_like_mark(w)) fail(line_no, "unknown edge mark '" + w + "'");
            intern(join(words, 0, words.size()), line_no);
            continue;
        }
        if (*at == 0 || *at + 1 == words.size()) fail(line_no, "edge needs a node on each side");
        const auto tok = *lookup(words[*at]);
        RawEdge e{join(words, 0, *at), join(words, *at + 1, words.size()), tok.left, tok.right, line_no};
        intern(e.a, line_no);
        intern(e.b, line_no);
        raw_edges.push_back(std::move(e));
    }

    MixedGraph g(names);
    for (const auto& e : raw_edges) {
        const auto a = index.at(normalize_name(e.a));
        const auto b = index.at(normalize_name(e.b));
        if (a == b) fail(e.line, "self-loop on " + e.a);
        if (g.adjacent(a, b)) fail(e.line, "duplicate edge between " + e.a + " and " + e.b);
        g.set_edge(a, b, e.mark_a, e.mark_b);
    }
    return g;
}

std::string format_graph(const MixedGraph& g) {
    std::string out;
    for (const auto& name : g.names()) out += name + "\n";
    for (const auto& e : g.edges()) {
        const std::string& a = g.name(e.a);
        const std::string& b = g.name(e.b);
        std::string line;
        // Prefer the left-to-right form for asymmetric marks.
        for (const auto& t : kTokens) {
            if (t.text == "<-" || t.text == "<-o" || t.text == "o-") continue;
            if (t.left == e.mark_a && t.right == e.mark_b) {
                line = a + " " + std::string(t.text) + " " + b;
                break;
            }
            if (t.left == e.mark_b && t.right == e.mark_a) {
                line = b + " " + std::string(t.text) + " " + a;
                break;
            }
        }
        out += line + "\n";
    }
    return out;
}

MixedGraph load_graph(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open graph file " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_graph(buf.str());
}

void save_graph(const MixedGraph& g, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write graph file " + path.string());
    out << format_graph(g);
}

}  // namespace fairpath
