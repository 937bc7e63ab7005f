#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace vibrokit {

/// One vibration trial: the parameters observed for the trial (file
/// convention: frequency in Hz) and the measured residual displacement.
struct VibrationSample {
    double omega_hz = 0.0;
    double zeta = 0.0;
    double theta_mm = 0.0;
};

class Dataset {
public:
    Dataset(std::vector<VibrationSample> samples, std::string name, std::uint64_t seed);

    const std::vector<VibrationSample>& samples() const { return samples_; }
    const VibrationSample& operator[](std::size_t i) const { return samples_[i]; }
    std::size_t size() const { return samples_.size(); }
    const std::string& name() const { return name_; }
    /// Generation seed; 0 marks externally supplied data.
    std::uint64_t seed() const { return seed_; }

    Dataset subset(const std::vector<std::size_t>& indices, const std::string& name) const;

    /// Schema: header `id,omega_hz,zeta,theta_mm`, LF line endings,
    /// shortest-round-trip decimals. Serialization is byte-stable.
    void save_csv(const std::string& path) const;
    static Dataset load_csv(const std::string& path);

private:
    std::vector<VibrationSample> samples_;
    std::string name_;
    std::uint64_t seed_ = 0;
};

void validate_sample(const VibrationSample& s);

} // namespace vibrokit
