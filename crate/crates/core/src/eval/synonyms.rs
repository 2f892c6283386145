//! Fixed paraphrase table used to perturb synthetic task queries.

pub const SYNONYMS: [(&str, &str); 52] = [
    ("merge", "combine"),
    ("split", "divide"),
    ("convert", "transform"),
    ("extract", "retrieve"),
    ("compress", "shrink"),
    ("render", "draw"),
    ("parse", "interpret"),
    ("validate", "verify"),
    ("summarize", "condense"),
    ("translate", "localize"),
    ("upload", "transmit"),
    ("download", "fetch"),
    ("encrypt", "encode"),
    ("schedule", "plan"),
    ("monitor", "observe"),
    ("filter", "screen"),
    ("sort", "order"),
    ("rotate", "turn"),
    ("resize", "scale"),
    ("annotate", "label"),
    ("classify", "categorize"),
    ("cluster", "group"),
    ("forecast", "predict"),
    ("detect", "spot"),
    ("measure", "quantify"),
    ("compare", "contrast"),
    ("archive", "store"),
    ("publish", "release"),
    ("sync", "mirror"),
    ("backup", "preserve"),
    ("invoice", "bill"),
    ("audit", "inspect"),
    ("chart", "plot"),
    ("table", "grid"),
    ("report", "memo"),
    ("spreadsheet", "ledger"),
    ("document", "paper"),
    ("image", "picture"),
    ("video", "footage"),
    ("audio", "sound"),
    ("photo", "snapshot"),
    ("map", "atlas"),
    ("email", "message"),
    ("calendar", "agenda"),
    ("contract", "agreement"),
    ("receipt", "voucher"),
    ("survey", "questionnaire"),
    ("budget", "allowance"),
    ("weather", "climate"),
    ("traffic", "congestion"),
    ("sensor", "probe"),
    ("dataset", "corpus"),
];

pub fn synonym_of(word: &str) -> Option<&'static str> {
    SYNONYMS.iter().find(|(w, _)| *w == word).map(|(_, s)| *s)
}
