use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const DEFAULT_MAX_BOUNCES: u32 = 7;

/// Which groups of channels a render produces.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ChannelFlags {
    pub gbuffer: bool,
    /// Per-light shading with and without occlusion, visibility, and the
    /// combined direct shading.
    pub per_light: bool,
    pub envmaps: bool,
}

impl Default for ChannelFlags {
    fn default() -> Self {
        ChannelFlags {
            gbuffer: true,
            per_light: true,
            envmaps: false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EnvmapConfig {
    /// Pixel stride between envmap sites.
    pub stride: usize,
    pub h_theta: usize,
    pub h_phi: usize,
    /// Sampling rounds per site; each round draws one uniform direction per
    /// texel and one shared light sample.
    pub samples: usize,
}

impl Default for EnvmapConfig {
    fn default() -> Self {
        EnvmapConfig {
            stride: 4,
            h_theta: 8,
            h_phi: 16,
            samples: 64,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RenderConfig {
    pub spp: usize,
    pub max_bounces: u32,
    pub seed: u64,
    pub channels: ChannelFlags,
    pub envmap: EnvmapConfig,
    /// Radiance channel limited to direct lighting.
    pub direct_only: bool,
    /// Radiance channel lit by this light id only.
    pub light_filter: Option<String>,
    /// Shadow tests for the radiance channel.
    pub occlusion: bool,
    /// Worker cap; `None` reads `OR_THREADS`, then falls back to all cores.
    #[serde(skip)]
    pub threads: Option<usize>,
}

impl Default for RenderConfig {
    fn default() -> Self {
        RenderConfig {
            spp: 16,
            max_bounces: DEFAULT_MAX_BOUNCES,
            seed: 0,
            channels: ChannelFlags::default(),
            envmap: EnvmapConfig::default(),
            direct_only: false,
            light_filter: None,
            occlusion: true,
            threads: None,
        }
    }
}

impl RenderConfig {
    pub fn validate(&self) -> Result<()> {
        if self.spp == 0 {
            return Err(Error::field("spp", "must be at least 1"));
        }
        let e = &self.envmap;
        if e.stride == 0 {
            return Err(Error::field("envmap.stride", "must be at least 1"));
        }
        if e.h_theta * e.h_phi == 0 {
            return Err(Error::field("envmap.h_theta/h_phi", "grid must have at least one texel"));
        }
        if e.samples == 0 {
            return Err(Error::field("envmap.samples", "must be at least 1"));
        }
        if self.threads == Some(0) {
            return Err(Error::field("threads", "must be at least 1"));
        }
        Ok(())
    }

    /// Bounce budget of the radiance channel.
    pub fn radiance_bounces(&self) -> u32 {
        if self.direct_only {
            self.max_bounces.min(1)
        } else {
            self.max_bounces
        }
    }

    pub fn thread_count(&self) -> Option<usize> {
        self.threads.or_else(|| {
            std::env::var("OR_THREADS")
                .ok()
                .and_then(|v| v.trim().parse::<usize>().ok())
                .filter(|&n| n > 0)
        })
    }
}
