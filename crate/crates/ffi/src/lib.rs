//! C ABI over the corpus generator, prompt renderer and response parser.
//!
//! Conventions: every fallible call returns a [`SylloStatus`]; on failure a
//! message is available from [`syllo_last_error`] on the same thread.
//! Handles are opaque and freed with their `_free` function; strings returned
//! through `char **` are freed with [`syllo_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use syllo_core::instantiate::{build_corpus, ArgumentInstance, Corpus, CorpusConfig};
use syllo_core::ontology::Ontology;
use syllo_core::parse::{classify, ResponseClass};
use syllo_core::prompts::{build_prompt, Mode, Task};
use syllo_core::Label;

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SylloStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    InvalidInput = 3,
    OutOfRange = 4,
    Internal = 5,
}

/// Opaque loaded ontology.
pub struct SylloOntology {
    inner: Ontology,
}

/// Opaque generated corpus.
pub struct SylloCorpus {
    inner: Corpus,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SylloResponseClass {
    Empty = 0,
    Irrelevant = 1,
    FollowingInstruction = 2,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SylloParsed {
    pub response_class: SylloResponseClass,
    /// 1 for True, 0 for False, -1 when no label was read.
    pub label: i32,
    pub cot_like: bool,
    /// Whether `premise_mask` carries a premise selection.
    pub has_premises: bool,
    /// Bit `k - 1` set when premise `k` was selected.
    pub premise_mask: u64,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(CString::new(msg).expect("nul bytes replaced")));
}

struct Fail(SylloStatus, String);

fn guard(f: impl FnOnce() -> Result<(), Fail>) -> SylloStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => SylloStatus::Ok,
        Ok(Err(Fail(status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic");
            SylloStatus::Internal
        }
    }
}

fn invalid(e: impl ToString) -> Fail {
    Fail(SylloStatus::InvalidInput, e.to_string())
}

unsafe fn str_arg<'a>(p: *const c_char, name: &str) -> Result<&'a str, Fail> {
    if p.is_null() {
        return Err(Fail(SylloStatus::NullPointer, format!("{name} is null")));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Fail(SylloStatus::InvalidUtf8, format!("{name} is not UTF-8")))
}

fn out_arg<T>(p: *mut T, name: &str) -> Result<(), Fail> {
    if p.is_null() {
        Err(Fail(SylloStatus::NullPointer, format!("{name} is null")))
    } else {
        Ok(())
    }
}

fn c_string(s: String) -> *mut c_char {
    CString::new(s.replace('\0', " ")).expect("nul bytes replaced").into_raw()
}

fn task_of(task: u32) -> Result<Task, Fail> {
    u8::try_from(task)
        .ok()
        .and_then(Task::from_number)
        .ok_or_else(|| Fail(SylloStatus::OutOfRange, format!("task {task} is not 1 or 2")))
}

/// Message of the last failed call on this thread, or null. Valid until the
/// next failing call on the same thread.
#[no_mangle]
pub extern "C" fn syllo_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn syllo_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// # Safety
/// `s` must be null or a string returned by this library, freed once.
#[no_mangle]
pub unsafe extern "C" fn syllo_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Parses ontology JSONL text.
///
/// # Safety
/// `jsonl` must be a NUL-terminated string; `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn syllo_ontology_from_jsonl(jsonl: *const c_char, out: *mut *mut SylloOntology) -> SylloStatus {
    guard(|| {
        out_arg(out, "out")?;
        *out = ptr::null_mut();
        let text = str_arg(jsonl, "jsonl")?;
        let inner = Ontology::from_jsonl_str(text).map_err(invalid)?;
        *out = Box::into_raw(Box::new(SylloOntology { inner }));
        Ok(())
    })
}

/// # Safety
/// `o` must be null or a handle from [`syllo_ontology_from_jsonl`], freed once.
#[no_mangle]
pub unsafe extern "C" fn syllo_ontology_free(o: *mut SylloOntology) {
    if !o.is_null() {
        drop(Box::from_raw(o));
    }
}

/// # Safety
/// `o` must be null or a live ontology handle.
#[no_mangle]
pub unsafe extern "C" fn syllo_ontology_pathway_count(o: *const SylloOntology) -> usize {
    o.as_ref().map_or(0, |o| o.inner.pathway_count())
}

/// # Safety
/// `o` must be null or a live ontology handle.
#[no_mangle]
pub unsafe extern "C" fn syllo_ontology_gene_count(o: *const SylloOntology) -> usize {
    o.as_ref().map_or(0, |o| o.inner.gene_count())
}

/// Builds and verifies a corpus. `config_json` may be null for defaults, or a
/// JSON object overriding any of `schemes`, `cap`, `min_distractors`,
/// `max_distractors`, `seed`, `synthetic_names`, `strategies`.
///
/// # Safety
/// `o` must be a live ontology handle; `config_json` null or NUL-terminated;
/// `out` writable.
#[no_mangle]
pub unsafe extern "C" fn syllo_corpus_build(
    o: *const SylloOntology,
    config_json: *const c_char,
    out: *mut *mut SylloCorpus,
) -> SylloStatus {
    guard(|| {
        out_arg(out, "out")?;
        *out = ptr::null_mut();
        let o = o.as_ref().ok_or_else(|| Fail(SylloStatus::NullPointer, "ontology is null".into()))?;
        let cfg: CorpusConfig = if config_json.is_null() {
            CorpusConfig::default()
        } else {
            serde_json::from_str(str_arg(config_json, "config_json")?).map_err(invalid)?
        };
        let inner = build_corpus(&o.inner, &cfg).map_err(invalid)?;
        *out = Box::into_raw(Box::new(SylloCorpus { inner }));
        Ok(())
    })
}

/// # Safety
/// `c` must be null or a handle from [`syllo_corpus_build`], freed once.
#[no_mangle]
pub unsafe extern "C" fn syllo_corpus_free(c: *mut SylloCorpus) {
    if !c.is_null() {
        drop(Box::from_raw(c));
    }
}

/// # Safety
/// `c` must be null or a live corpus handle.
#[no_mangle]
pub unsafe extern "C" fn syllo_corpus_len(c: *const SylloCorpus) -> usize {
    c.as_ref().map_or(0, |c| c.inner.instances.len())
}

/// Instances whose build-time verification failed.
///
/// # Safety
/// `c` must be null or a live corpus handle.
#[no_mangle]
pub unsafe extern "C" fn syllo_corpus_failures(c: *const SylloCorpus) -> usize {
    c.as_ref().map_or(0, |c| c.inner.failures())
}

/// Instance `index` as a JSON object.
///
/// # Safety
/// `c` must be a live corpus handle; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn syllo_corpus_instance_json(c: *const SylloCorpus, index: usize, out: *mut *mut c_char) -> SylloStatus {
    guard(|| {
        out_arg(out, "out")?;
        *out = ptr::null_mut();
        let c = c.as_ref().ok_or_else(|| Fail(SylloStatus::NullPointer, "corpus is null".into()))?;
        let inst = c.inner.instances.get(index).ok_or_else(|| {
            Fail(
                SylloStatus::OutOfRange,
                format!("index {index} out of range for {} instances", c.inner.instances.len()),
            )
        })?;
        *out = c_string(serde_json::to_string(inst).expect("instance serializes"));
        Ok(())
    })
}

/// Prompt text for an instance (as produced by
/// [`syllo_corpus_instance_json`]); `task` is 1 or 2, `few_shot` selects the
/// demonstration layout.
///
/// # Safety
/// `instance_json` must be NUL-terminated; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn syllo_prompt_render(
    instance_json: *const c_char,
    task: u32,
    few_shot: bool,
    out: *mut *mut c_char,
) -> SylloStatus {
    guard(|| {
        out_arg(out, "out")?;
        *out = ptr::null_mut();
        let inst: ArgumentInstance = serde_json::from_str(str_arg(instance_json, "instance_json")?).map_err(invalid)?;
        let mode = if few_shot { Mode::FewShot } else { Mode::ZeroShot };
        *out = c_string(build_prompt(&inst, task_of(task)?, mode).text);
        Ok(())
    })
}

/// Classifies one model output for a prompt with `n_premises` premises.
/// Premise numbers above 64 cannot be represented in the mask and make
/// the call fail with `OutOfRange`.
///
/// # Safety
/// `text` must be NUL-terminated; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn syllo_classify(text: *const c_char, task: u32, n_premises: usize, out: *mut SylloParsed) -> SylloStatus {
    guard(|| {
        out_arg(out, "out")?;
        let text = str_arg(text, "text")?;
        let r = classify("", text, task_of(task)?, n_premises);
        let mut mask = 0u64;
        for &k in r.premises.iter().flatten() {
            if k > 64 {
                return Err(Fail(SylloStatus::OutOfRange, format!("premise {k} does not fit the mask")));
            }
            mask |= 1 << (k - 1);
        }
        *out = SylloParsed {
            response_class: match r.class {
                ResponseClass::Empty => SylloResponseClass::Empty,
                ResponseClass::Irrelevant => SylloResponseClass::Irrelevant,
                ResponseClass::FollowingInstruction => SylloResponseClass::FollowingInstruction,
            },
            label: match r.label {
                Some(Label::True) => 1,
                Some(Label::False) => 0,
                None => -1,
            },
            cot_like: r.cot_like,
            has_premises: r.premises.is_some(),
            premise_mask: mask,
        };
        Ok(())
    })
}
