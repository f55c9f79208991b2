//! Built-in experiment definitions, written in the config file format.

use crate::config::Document;
use crate::error::{Error, Result};

pub struct Preset {
    pub name: &'static str,
    pub description: &'static str,
    pub text: &'static str,
}

pub const PRESETS: &[Preset] = &[
    Preset {
        name: "bilinear-fig1",
        description: "10+10 bilinear min-max game, GNI against five baselines",
        text: "
name = bilinear-fig1
game = bilinear
n1 = 10
n2 = 10
init = normal
svg = true
max_iters = 10000
grad_tol = 1e-6

[solver gni]
rho = 0.01
[solver sim_gd]
rho = 0.001
[solver adam]
rho = 0.001
[solver omd]
rho = 0.001
[solver extragradient]
rho = 0.001
[solver extrapolation]
rho = 0.001
",
    },
    Preset {
        name: "quadratic",
        description: "20+20 quadratic game with indefinite Q_i",
        text: "
name = quadratic
game = quadratic
blocks = 20, 20
spectrum = indefinite
init = normal
svg = true
max_iters = 10000
grad_tol = 1e-6

[solver gni]
rho = 0.01
[solver sim_gd]
rho = 1e-4
[solver adam]
rho = 1e-4
[solver omd]
rho = 1e-4
[solver extragradient]
rho = 1e-4
[solver extrapolation]
rho = 1e-4
",
    },
    Preset {
        name: "quadratic-definite",
        description: "20+20 quadratic game with positive definite Q_i",
        text: "
name = quadratic-definite
game = quadratic
blocks = 20, 20
spectrum = definite
init = normal
svg = true
max_iters = 10000
grad_tol = 1e-6

[solver gni]
rho = 0.01
[solver sim_gd]
rho = 1e-4
[solver adam]
rho = 1e-4
[solver omd]
rho = 1e-4
[solver extragradient]
rho = 1e-4
[solver extrapolation]
rho = 1e-4
",
    },
    Preset {
        name: "dirac",
        description: "Dirac-delta GAN, 100 uniform starts in [0,4]^2",
        text: "
name = dirac
game = dirac_delta
theta = -2
starts = 100
init = uniform(0, 4)
svg = true
max_iters = 10000
grad_tol = 1e-5

[solver gni]
eta = 0.5
rho = 0.5
[solver sim_gd]
rho = 0.001
[solver adam]
rho = 0.001
[solver omd]
rho = 0.001
[solver extragradient]
rho = 0.001
[solver extrapolation]
rho = 0.001
",
    },
    Preset {
        name: "dirac-multistart",
        description: "Dirac-delta GAN, 1000 uniform starts in [-4,4]^2",
        text: "
name = dirac-multistart
game = dirac_delta
theta = -2
starts = 1000
init = uniform(-4, 4)
max_iters = 10000
grad_tol = 1e-5

[solver gni]
eta = 0.5
rho = 0.5
[solver sim_gd]
rho = 0.001
[solver adam]
rho = 0.001
[solver omd]
rho = 0.001
[solver extragradient]
rho = 0.001
[solver extrapolation]
rho = 0.001
",
    },
    Preset {
        name: "linear-gan",
        description: "Linear GAN, d = 10, real mean 2e, started at e/d",
        text: "
name = linear-gan
game = linear_gan
d = 10
mu_scale = 2
covariance = identity
m_samples = 512
init = default
svg = true
plot = V
max_iters = 5000
grad_tol = 1e-6

[solver gni]
eta = 0.1
rho = 1
",
    },
    Preset {
        name: "residual",
        description: "Strongly monotone 10+10 quadratic game, residual descent against GNI",
        text: "
name = residual
game = quadratic
blocks = 10, 10
spectrum = strongly_monotone
beta = 0.5
starts = 10
init = normal
svg = true
max_iters = 20000
grad_tol = 1e-8

[solver residual]
[solver gni]
",
    },
];

pub fn find(name: &str) -> Result<&'static Preset> {
    PRESETS
        .iter()
        .find(|p| p.name == name)
        .ok_or_else(|| Error::UnknownPreset(name.to_string()))
}

pub fn document(name: &str) -> Result<Document> {
    Document::parse(find(name)?.text)
}
