#include "ldspec/trajectory_io.hpp"

#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <vector>

#include "ldspec/errors.hpp"

namespace ldspec {

namespace {

constexpr char kMagic[8] = {'L', 'D', 'T', 'R', 'A', 'J', '0', '1'};

template <typename T>
void write_pod(std::ostream& os, const T& v) {
    os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T read_pod(std::istream& is) {
    T v{};
    is.read(reinterpret_cast<char*>(&v), sizeof(T));
    if (!is) throw ConfigError("trajectory file: truncated record");
    return v;
}

void write_string(std::ostream& os, const std::string& s) {
    write_pod<std::uint32_t>(os, static_cast<std::uint32_t>(s.size()));
    os.write(s.data(), static_cast<std::streamsize>(s.size()));
}

std::string read_string(std::istream& is) {
    const auto len = read_pod<std::uint32_t>(is);
    if (len > 4096) throw ConfigError("trajectory file: corrupt string length");
    std::string s(len, '\0');
    is.read(s.data(), len);
    if (!is) throw ConfigError("trajectory file: truncated string");
    return s;
}

} // namespace

void write_trajectory(const std::filesystem::path& path, const Trajectory& traj) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw ConfigError("cannot open '" + path.string() + "' for writing");

    os.write(kMagic, sizeof(kMagic));
    write_pod<std::uint64_t>(os, traj.n_ions());
    write_pod<std::uint64_t>(os, traj.n_frames());
    write_pod<std::uint64_t>(os, traj.species.size());
    write_pod<double>(os, traj.sample_interval);
    write_pod<double>(os, traj.duration());
    const std::uint32_t flags = traj.species_temperature.empty() ? 0u : 1u;
    write_pod<std::uint32_t>(os, flags);

    for (const auto& s : traj.species) {
        write_string(os, s.name);
        write_pod<double>(os, s.mass);
        write_pod<double>(os, s.charge);
    }
    os.write(reinterpret_cast<const char*>(traj.species_index.data()),
             static_cast<std::streamsize>(traj.species_index.size() * sizeof(std::uint16_t)));
    if (flags & 1u)
        os.write(reinterpret_cast<const char*>(traj.species_temperature.data()),
                 static_cast<std::streamsize>(traj.species_temperature.size() * sizeof(double)));
    os.write(reinterpret_cast<const char*>(traj.frames.data()),
             static_cast<std::streamsize>(traj.frames.size() * sizeof(Vec3)));
    if (!os) throw ConfigError("failed writing '" + path.string() + "'");
}

Trajectory read_trajectory(const std::filesystem::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw ConfigError("cannot open trajectory file '" + path.string() + "'");

    char magic[8];
    is.read(magic, sizeof(magic));
    if (!is || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0)
        throw ConfigError("'" + path.string() + "' is not a trajectory file");

    const auto n_ions = read_pod<std::uint64_t>(is);
    const auto n_frames = read_pod<std::uint64_t>(is);
    const auto n_species = read_pod<std::uint64_t>(is);

    Trajectory traj;
    traj.sample_interval = read_pod<double>(is);
    const double duration = read_pod<double>(is);
    const auto flags = read_pod<std::uint32_t>(is);

    if (n_species > 64 || n_ions > (1ull << 32) || n_frames > (1ull << 40))
        throw ConfigError("trajectory file: implausible header counts");

    for (std::uint64_t k = 0; k < n_species; ++k) {
        Species s;
        s.name = read_string(is);
        s.mass = read_pod<double>(is);
        s.charge = read_pod<double>(is);
        traj.species.push_back(std::move(s));
    }

    traj.species_index.resize(n_ions);
    is.read(reinterpret_cast<char*>(traj.species_index.data()),
            static_cast<std::streamsize>(n_ions * sizeof(std::uint16_t)));
    if (flags & 1u) {
        traj.species_temperature.resize(n_frames * n_species);
        is.read(reinterpret_cast<char*>(traj.species_temperature.data()),
                static_cast<std::streamsize>(traj.species_temperature.size() * sizeof(double)));
    }
    traj.frames.resize(n_frames * n_ions);
    is.read(reinterpret_cast<char*>(traj.frames.data()),
            static_cast<std::streamsize>(traj.frames.size() * sizeof(Vec3)));
    if (!is) throw ConfigError("trajectory file: truncated body");

    const double expect = traj.duration();
    if (n_frames > 0 && std::abs(expect - duration) > 1e-9 * std::max(1.0, std::abs(expect)))
        throw ConfigError("trajectory file: header duration inconsistent with frame count");
    return traj;
}

void export_trajectory_csv(const std::filesystem::path& path, const Trajectory& traj) {
    std::ofstream os(path);
    if (!os) throw ConfigError("cannot open '" + path.string() + "' for writing");
    os << "time_s,ion,species,x_m,y_m,z_m\n";
    char buf[128];
    for (std::size_t f = 0; f < traj.n_frames(); ++f) {
        const double t = static_cast<double>(f) * traj.sample_interval;
        for (std::size_t i = 0; i < traj.n_ions(); ++i) {
            const Vec3& p = traj.position(f, i);
            std::snprintf(buf, sizeof(buf), "%.17g,%zu,%s,%.17g,%.17g,%.17g\n", t, i,
                          traj.species[traj.species_index[i]].name.c_str(), p.x, p.y, p.z);
            os << buf;
        }
    }
}

std::uint64_t fnv1a_file_hash(const std::filesystem::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw ConfigError("cannot open '" + path.string() + "' for hashing");
    std::uint64_t h = 14695981039346656037ull;
    char buf[65536];
    while (is) {
        is.read(buf, sizeof(buf));
        const std::streamsize got = is.gcount();
        for (std::streamsize i = 0; i < got; ++i) {
            h ^= static_cast<unsigned char>(buf[i]);
            h *= 1099511628211ull;
        }
    }
    return h;
}

} // namespace ldspec
