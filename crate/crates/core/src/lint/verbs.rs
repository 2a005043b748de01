/// Base-form verbs that open requirement clauses, sorted for binary search.
const VERBS: &[&str] = &[
    "accept", "access", "acknowledge", "add", "adjust", "alert", "allow", "analyse", "analyze",
    "anonymise", "anonymize", "answer", "appeal", "apply", "approve", "archive", "ask", "assess",
    "audit", "authenticate", "block", "browse", "build", "calculate", "change", "check", "choose",
    "clarify", "classify", "collect", "communicate", "compare", "configure", "confirm", "consent",
    "contact", "contest", "control", "correct", "create", "customise", "customize", "delete",
    "deliver", "describe", "detect", "disable", "disclose", "display", "document", "download",
    "edit", "enable", "encrypt", "ensure", "enter", "erase", "evaluate", "explain", "export",
    "filter", "find", "flag", "generate", "give", "grant", "hide", "identify", "import", "inform",
    "inspect", "install", "keep", "know", "learn", "limit", "list", "log", "maintain", "manage",
    "mark", "measure", "modify", "monitor", "notify", "obtain", "open", "opt", "override",
    "pause", "play", "present", "prevent", "print", "protect", "provide", "publish", "query",
    "rate", "read", "receive", "record", "rectify", "register", "reject", "remove", "report",
    "request", "restrict", "retain", "retrieve", "review", "revoke", "save", "search", "see",
    "select", "send", "set", "share", "show", "sign", "sort", "specify", "start", "stop", "store",
    "submit", "subscribe", "summarise", "summarize", "support", "switch", "test", "trace",
    "track", "train", "transfer", "translate", "trust", "understand", "undo", "unsubscribe",
    "update", "upload", "use", "validate", "verify", "view", "withdraw", "write",
];

/// True if `word` (any case) is a base-form verb from the built-in list.
pub fn is_common_verb(word: &str) -> bool {
    let w = word.to_lowercase();
    VERBS.binary_search(&w.as_str()).is_ok()
}
