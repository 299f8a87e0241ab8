use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::io::{write_pfm, PfmImage};

use super::{ChannelSet, RenderConfig};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChannelEntry {
    pub name: String,
    pub file: String,
    pub channels: usize,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub light_id: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub light_index: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnvmapEntry {
    pub direct_file: String,
    pub full_file: String,
    pub rows: usize,
    pub cols: usize,
    pub stride: usize,
    pub h_theta: usize,
    pub h_phi: usize,
    pub frame: String,
    pub binning: String,
    pub value: String,
}

/// Index of every file a render wrote.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub width: usize,
    pub height: usize,
    pub config: RenderConfig,
    pub channels: Vec<ChannelEntry>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub envmaps: Option<EnvmapEntry>,
}

impl Manifest {
    pub fn channel(&self, name: &str) -> Option<&ChannelEntry> {
        self.channels.iter().find(|c| c.name == name)
    }
}

pub const MANIFEST_FILE: &str = "manifest.json";

impl ChannelSet {
    /// Writes every channel as PFM plus `manifest.json` into `dir`.
    pub fn write(&self, dir: impl AsRef<Path>, config: &RenderConfig) -> Result<Manifest> {
        let dir = dir.as_ref();
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        let mut entries = Vec::new();
        let mut put = |name: String, img: &PfmImage, light: Option<(&str, usize)>| -> Result<()> {
            let file = format!("{name}.pfm");
            write_pfm(img, dir.join(&file))?;
            entries.push(ChannelEntry {
                name,
                file,
                channels: img.channels,
                light_id: light.map(|l| l.0.to_string()),
                light_index: light.map(|l| l.1),
            });
            Ok(())
        };

        put("radiance".into(), &self.radiance.mean, None)?;
        put("radiance_stderr".into(), &self.radiance.stderr, None)?;
        if let Some(g) = &self.gbuffer {
            put("albedo".into(), &g.albedo, None)?;
            put("normal".into(), &g.normal, None)?;
            put("depth".into(), &g.depth, None)?;
            put("roughness".into(), &g.roughness, None)?;
            put("instance_mask".into(), &g.instance_mask, None)?;
            put("light_mask".into(), &g.light_mask, None)?;
        }
        if let Some(d) = &self.direct {
            put("direct_shading".into(), &d.mean, None)?;
            put("direct_shading_stderr".into(), &d.stderr, None)?;
        }
        for l in &self.per_light {
            let tag = Some((l.light_id.as_str(), l.light_index));
            let i = l.light_index;
            put(format!("shading_light{i}"), &l.occluded.mean, tag)?;
            put(format!("shading_light{i}_stderr"), &l.occluded.stderr, tag)?;
            put(format!("shading_noocc_light{i}"), &l.unoccluded.mean, tag)?;
            put(format!("shading_noocc_light{i}_stderr"), &l.unoccluded.stderr, tag)?;
            put(format!("visibility_light{i}"), &l.visibility, tag)?;
        }
        let envmaps = match &self.envmaps {
            Some(g) => {
                write_pfm(&g.direct, dir.join("envmap_direct.pfm"))?;
                write_pfm(&g.full, dir.join("envmap_full.pfm"))?;
                Some(EnvmapEntry {
                    direct_file: "envmap_direct.pfm".into(),
                    full_file: "envmap_full.pfm".into(),
                    rows: g.rows,
                    cols: g.cols,
                    stride: g.stride,
                    h_theta: g.h_theta,
                    h_phi: g.h_phi,
                    frame: "local shading frame: z = shading normal, x/y = branchless orthonormal basis of z; \
                            miss sites use the view ray as z"
                        .into(),
                    binning: "row i: cos(theta) in [1-(i+1)/h_theta, 1-i/h_theta]; column j: phi in [j, j+1]*2pi/h_phi; \
                              site (r, c) is pixel (c*stride, r*stride)"
                        .into(),
                    value: "cosine-weighted mean radiance over the texel".into(),
                })
            }
            None => None,
        };

        let manifest = Manifest {
            width: self.width,
            height: self.height,
            config: config.clone(),
            channels: entries,
            envmaps,
        };
        let path = dir.join(MANIFEST_FILE);
        let text = serde_json::to_string_pretty(&manifest)?;
        fs::write(&path, text + "\n").map_err(|e| Error::io(&path, e))?;
        Ok(manifest)
    }
}
