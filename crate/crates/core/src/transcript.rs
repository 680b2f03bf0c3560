//! Transcripts as JSON lines: a header with the game setup, then one record
//! per move. Rationals are written as exact `"n/d"` strings.

use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::game::{Annotation, GameBox, GameParams, GameWeights, Move, Player, Transcript};
use crate::rational::{serde_q, RationalVector, Q};

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct Header {
    #[serde(with = "serde_q::vec")]
    weights: Vec<Q>,
    #[serde(with = "serde_q")]
    a: Q,
    #[serde(with = "serde_q")]
    b: Q,
    #[serde(with = "serde_q")]
    t1: Q,
    #[serde(with = "serde_q")]
    a_star: Q,
    #[serde(with = "serde_q::vec")]
    shape: Vec<Q>,
}

#[derive(Debug, Serialize, Deserialize)]
struct Record {
    round: usize,
    player: Player,
    #[serde(with = "serde_q")]
    t: Q,
    center: RationalVector,
    #[serde(flatten)]
    note: Annotation,
}

fn write_line<W: Write, T: Serialize>(sink: &mut W, value: &T) -> Result<()> {
    serde_json::to_writer(&mut *sink, value).map_err(|e| Error::Io(e.to_string()))?;
    sink.write_all(b"\n")?;
    Ok(())
}

pub fn emit_transcript<W: Write>(t: &Transcript, sink: &mut W) -> Result<()> {
    let first = t
        .moves
        .first()
        .ok_or_else(|| Error::InvalidParams("empty transcript".into()))?;
    write_line(
        sink,
        &Header {
            weights: t.weights.r().to_vec(),
            a: t.params.a.clone(),
            b: t.params.b.clone(),
            t1: t.params.t1.clone(),
            a_star: t.params.a_star.clone(),
            shape: first.bx.shape.clone(),
        },
    )?;
    for m in &t.moves {
        write_line(
            sink,
            &Record {
                round: m.round,
                player: m.player,
                t: m.bx.t.clone(),
                center: m.bx.center.clone(),
                note: m.note.clone().unwrap_or_default(),
            },
        )?;
    }
    sink.flush()?;
    Ok(())
}

pub fn transcript_to_string(t: &Transcript) -> Result<String> {
    let mut buf = Vec::new();
    emit_transcript(t, &mut buf)?;
    Ok(String::from_utf8(buf).expect("JSON output is UTF-8"))
}

/// Parses a transcript. Boxes are rebuilt from `(center, t)` and the header's
/// domain shape; legality is not checked here (see [`replay_transcript`]).
pub fn read_transcript<R: BufRead>(source: R) -> Result<Transcript> {
    let mut lines = source.lines().enumerate().filter_map(|(i, l)| match l {
        Ok(l) if l.trim().is_empty() => None,
        other => Some((i + 1, other)),
    });
    let at = |line: usize| {
        move |e: Error| Error::Parse {
            line,
            message: e.to_string(),
        }
    };

    let (line, text) = lines.next().ok_or(Error::Parse {
        line: 1,
        message: "missing header".into(),
    })?;
    let header: Header = serde_json::from_str(&text?).map_err(|e| Error::Parse {
        line,
        message: e.to_string(),
    })?;
    let weights = GameWeights::flow(header.weights).map_err(at(line))?;
    let params = GameParams {
        a: header.a,
        b: header.b,
        t1: header.t1,
        a_star: header.a_star,
    };
    if header.shape.len() != weights.dim() {
        return Err(at(line)(Error::DimensionMismatch {
            expected: weights.dim(),
            got: header.shape.len(),
        }));
    }

    let mut moves = Vec::new();
    for (line, text) in lines {
        let rec: Record = serde_json::from_str(&text?).map_err(|e| Error::Parse {
            line,
            message: e.to_string(),
        })?;
        let bx =
            GameBox::exact(rec.center, rec.t, &weights, header.shape.clone()).map_err(at(line))?;
        let note = (!rec.note.is_empty()).then_some(rec.note);
        moves.push(Move {
            round: rec.round,
            player: rec.player,
            bx,
            note,
        });
    }
    Ok(Transcript {
        weights,
        params,
        moves,
    })
}

/// Reads a transcript and re-checks every move.
pub fn replay_transcript<R: BufRead>(source: R) -> Result<Transcript> {
    let t = read_transcript(source)?;
    t.validate()?;
    Ok(t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::adversary::{Adversary, BobKind};
    use crate::bad::make_bad_strategy;
    use crate::geometry::AffineDiagonalMap;
    use crate::rational::{q, qi};

    fn sample() -> Transcript {
        let w = GameWeights::new(vec![q(1, 3), q(2, 3)]).unwrap();
        let params = GameParams::new(qi(3), qi(3), qi(3), &w).unwrap();
        let mut alice =
            make_bad_strategy(&w, AffineDiagonalMap::identity(2), qi(3), q(1, 2)).unwrap();
        let mut bob = Adversary::new(BobKind::RationalSeeker, 5);
        crate::game::play(&mut alice, &mut bob, &w, &params, 3).unwrap()
    }

    #[test]
    fn round_trip_is_identity() {
        let t = sample();
        let text = transcript_to_string(&t).unwrap();
        assert_eq!(text.lines().count(), t.moves.len() + 1);
        assert!(text.contains("\"danger_count\""));
        let back = replay_transcript(text.as_bytes()).unwrap();
        assert_eq!(back, t);
        assert_eq!(transcript_to_string(&back).unwrap(), text);
    }

    #[test]
    fn edited_center_fails_replay_at_its_round() {
        let t = sample();
        let text = transcript_to_string(&t).unwrap();
        let mut lines: Vec<String> = text.lines().map(String::from).collect();
        // line 4 is A_2's predecessor B_2; move B_2 off into a corner
        let mut rec: serde_json::Value = serde_json::from_str(&lines[3]).unwrap();
        assert_eq!(rec["player"], "bob");
        rec["center"] = serde_json::json!(["0/1", "0/1"]);
        lines[3] = rec.to_string();
        let edited = lines.join("\n");
        let err = replay_transcript(edited.as_bytes()).unwrap_err();
        assert_eq!(
            err,
            Error::IllegalMove {
                player: Player::Bob,
                round: 2
            }
        );
    }

    #[test]
    fn malformed_lines_report_their_number() {
        let t = sample();
        let mut text = transcript_to_string(&t).unwrap();
        text.push_str(
            "{\"round\": 9, \"player\": \"alice\", \"t\": \"x\", \"center\": [\"1/2\", \"1/2\"]}\n",
        );
        let line = text.lines().count();
        match read_transcript(text.as_bytes()).unwrap_err() {
            Error::Parse { line: l, .. } => assert_eq!(l, line),
            e => panic!("unexpected {e}"),
        }
        assert!(matches!(
            read_transcript(&b""[..]).unwrap_err(),
            Error::Parse { line: 1, .. }
        ));
    }
}
