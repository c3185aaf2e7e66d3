mod common;

use common::golden;
use tubelet::storage::{
    read_clip, read_history, read_mask, write_clip, write_history, write_mask,
};
use tubelet::tubelet_core::contrastive::EpochStats;
use tubelet::tubelet_core::synth::{gen_clip, ClipKind};
use tubelet::tubelet_core::CoverageGrid;

#[test]
fn golden_clip() {
    golden::clip_golden().unwrap();
}

#[test]
fn golden_checkpoint() {
    golden::checkpoint_golden().unwrap();
}

#[test]
fn golden_manifest() {
    golden::manifest_golden().unwrap();
}

#[test]
fn golden_configs() {
    golden::config_golden().unwrap();
}

#[test]
fn desk_clip_file_size() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("c.tbc");
    let clip = gen_clip(ClipKind::DriftingBlobs, (16, 32, 32), 5).unwrap();
    write_clip(&clip, &path).unwrap();
    assert_eq!(std::fs::metadata(&path).unwrap().len(), 22 + 49152);
    assert_eq!(read_clip(&path).unwrap(), clip);
}

#[test]
fn mask_and_history_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let grid = CoverageGrid::from_data(2, 1, 2, vec![0.0, 0.5, 1.0, 0.125]).unwrap();
    write_mask(&grid, dir.path().join("m.tbm")).unwrap();
    assert_eq!(read_mask(dir.path().join("m.tbm")).unwrap(), grid);

    let h = vec![
        EpochStats { epoch: 0, mean_loss: 5.123_456_789_012_345, lr: 0.01 },
        EpochStats { epoch: 1, mean_loss: 4.0, lr: 1.0 / 3.0 },
    ];
    let path = dir.path().join("history.csv");
    write_history(&path, &h).unwrap();
    assert!(std::fs::read_to_string(&path).unwrap().starts_with("epoch,mean_loss,lr\n0,"));
    assert_eq!(read_history(&path).unwrap(), h);
}
