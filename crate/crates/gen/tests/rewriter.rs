use readctl_core::levels::LevelMap;
use readctl_core::metrics::{accuracy, spearman};
use readctl_core::text::analyze;
use readctl_core::Level;
use readctl_gen::rewrite::{mock_rewrite, rewrite_toward, RewriteOptions, SynonymLexicon};
use readctl_gen::synth::synthetic_corpus;

const APPENDIX_SOURCE: &str = "When the young people returned to the ballroom, it presented a decidedly changed appearance. Instead of an interior scene, it was a winter landscape. The floor was covered with snow-white canvas, not laid on smoothly, but rumpled over bumps and hillocks, like a real snow field. The numerous palms and evergreens that had decorated the room, were powdered with flour and strewn with tufts of cotton, like snow. Also diamond dust had been lightly sprinkled on them, and glittering crystal icicles hung from the branches. At each end of the room, on the wall, hung a beautiful bear-skin rug. These rugs were for prizes, one for the girls and one for the boys. And this was the game. The girls were gathered at one end of the room and the boys at the other, and one end was called the North Pole, and the other the South Pole. Each player was given a small flag which they were to plant on reaching the Pole. This would have been an easy matter, but each traveller was obliged to wear snowshoes.";

fn fres(text: &str) -> f64 {
    analyze::<f64>(text).unwrap().fres
}

#[test]
fn appendix_passage_reaches_the_easiest_class() {
    let out = mock_rewrite(APPENDIX_SOURCE, Level::L95, 0);
    let f = fres(&out);
    assert!((91.0..=99.0).contains(&f), "{f}\n{out}");
}

#[test]
fn appendix_passage_reaches_every_level() {
    for level in Level::ALL {
        let out = mock_rewrite(APPENDIX_SOURCE, level, 0);
        let f = fres(&out);
        println!("{level}: {f:.1}");
        assert!((f - f64::from(level.label())).abs() <= 4.0, "{level}: {f}\n{out}");
    }
}

#[test]
fn synthetic_passages_land_within_tolerance() {
    let corpus = synthetic_corpus(50, 10.0, 95.0, 150, 11);
    let mut within = 0;
    let (mut rho, mut acc) = (0.0, 0.0);
    for entry in &corpus {
        let generated = LevelMap::from_fn(|level| fres(&mock_rewrite(&entry.text, level, 0)));
        for (level, &f) in generated.iter() {
            within += usize::from((f - f64::from(level.label())).abs() <= 4.0);
        }
        rho += spearman(&generated);
        acc += accuracy(&generated);
    }
    let n = corpus.len() as f64;
    println!("within {within}/400, rho {:.3}, acc {:.3}", rho / n, acc / n);
    assert!(within as f64 >= 0.9 * 400.0);
}

#[test]
fn own_midpoint_needs_at_most_two_sweeps() {
    let lex = SynonymLexicon::builtin();
    let start = fres(APPENDIX_SOURCE);
    let out = rewrite_toward(APPENDIX_SOURCE, 75.0, 0, lex, RewriteOptions::default());
    assert!(out.iterations <= 2);
    assert!((out.final_fres - start).abs() <= 4.0);
}

#[test]
fn rewriting_is_deterministic() {
    let a = mock_rewrite(APPENDIX_SOURCE, Level::L20, 42);
    assert_eq!(a, mock_rewrite(APPENDIX_SOURCE, Level::L20, 42));
}

