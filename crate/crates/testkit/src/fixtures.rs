//! Fixed inputs with hand-counted expectations.

/// 20 researchers/students, 10 organization units, 10 projects, 10
/// publications, cross-referenced.
pub fn records_json() -> String {
    let mut records = Vec::new();
    for i in 0..10 {
        let kind = [
            "University",
            "Faculty",
            "Institute",
            "Enterprise",
            "Laboratory",
        ][i % 5];
        records.push(format!(
            r#"{{"id": "org{i}", "type": "{kind}", "properties": {{"name": ["Unit {i}"]}}}}"#
        ));
    }
    for i in 0..20 {
        let kind = if i % 3 == 0 { "Student" } else { "Researcher" };
        records.push(format!(
            r#"{{"id": "person{i}", "type": "{kind}", "properties": {{"name": "Person \"{i}\"", "member_of": [{{"@id": "org{}"}}]}}}}"#,
            i % 10
        ));
    }
    for i in 0..10 {
        let skill = if i % 2 == 0 {
            "Semantic Web"
        } else {
            "Databases\nand more"
        };
        records.push(format!(
            r#"{{"id": "proj{i}", "type": "{}", "properties": {{"title": ["Project {i}"], "expertise_skill": ["{}"], "project_persons": [{{"@id": "person{i}"}}, {{"@id": "person{}"}}], "project_organizations": {{"@id": "org{}"}}}}}}"#,
            if i % 4 == 0 { "EuropeanProject" } else { "Project" },
            skill.replace('\n', "\\n"),
            i + 10,
            i
        ));
    }
    for i in 0..10 {
        records.push(format!(
            r#"{{"id": "pub{i}", "type": "JournalArticle", "properties": {{"title": ["Paper {i}"], "publication_author": [{{"@id": "person{}"}}]}}}}"#,
            2 * i
        ));
    }
    assert_eq!(records.len(), 50);
    format!(
        r#"{{"base_uri": "http://auris.example.org/obj#", "records": [{}]}}"#,
        records.join(",\n")
    )
}

pub const PLAIN_PAGE: &str = "<!DOCTYPE html>\n<html>\n<head><meta charset=\"utf-8\"><title>Group</title></head>\n<body><p>Members</p></body>\n</html>\n";

/// Lines 2, 3, 6, 8, 9 and 10 are malformed; lines 1 and 7 parse.
pub const MALFORMED_TRIPLES: &str = "\
<http://ex.org/a> <http://ex.org/p> <http://ex.org/b> .
<http://ex.org/a> <http://ex.org/p> .
\"lit\" <http://ex.org/p> <http://ex.org/b> .

# comment
<http://ex.org/a> <http://ex.org/p> \"unterminated .
<http://ex.org/a> <http://ex.org/p> \"ok\"@en .
<http://ex.org/a> <http://ex.org/p> <http://ex.org/b>
<not an iri> <http://ex.org/p> <http://ex.org/b> .
_:b1 <http://ex.org/p> \"x\"@not_a_tag .
";

pub const MALFORMED_ERROR_LINES: [usize; 6] = [2, 3, 6, 8, 9, 10];
pub const MALFORMED_VALID_TRIPLES: usize = 2;

/// The ontology term table transcribed by hand as (root class, term label).
/// Labels are the table's wording; the roots are the eleven top-level
/// classes. "Information system" occurs under two roots.
pub const TABLE_TERMS: [(&str, &str); 69] = [
    ("OrganizationUnit", "Enterprise"),
    ("OrganizationUnit", "Higher Education Establishment"),
    ("OrganizationUnit", "University"),
    ("OrganizationUnit", "Faculty"),
    ("OrganizationUnit", "Institute"),
    ("OrganizationUnit", "International organization"),
    ("OrganizationUnit", "Joint Research Center"),
    ("OrganizationUnit", "Non-research private non-profit"),
    ("OrganizationUnit", "Non-research public sector"),
    ("OrganizationUnit", "Private research center"),
    ("OrganizationUnit", "Private non-profit research center"),
    ("OrganizationUnit", "Public research center"),
    ("OrganizationUnit", "Laboratory"),
    ("OrganizationUnit", "Research Group"),
    ("Project", "European project"),
    ("Project", "Fundamental research project"),
    ("Project", "Applied research project"),
    ("Project", "Financed by official bodies project"),
    ("Person", "Researcher"),
    ("Person", "Student"),
    ("Product", "Fundamental"),
    ("Product", "Applied"),
    ("Product", "Software"),
    ("Product", "Software library"),
    ("Product", "Information system"),
    ("Product", "Compound"),
    ("Product", "Process"),
    ("Product", "Technology"),
    ("Product", "Algorithm"),
    ("Product", "Documentation"),
    ("Product", "Proposal"),
    ("Event", "Conference"),
    ("Event", "Cultural event"),
    ("Event", "Exhibition"),
    ("Event", "Political event"),
    ("Event", "Sport event"),
    ("Event", "Trade fair"),
    ("Event", "Workshop"),
    ("Publication", "Abstract"),
    ("Publication", "Book"),
    ("Publication", "Conference paper"),
    ("Publication", "Conference proceedings"),
    ("Publication", "Dissertation"),
    ("Publication", "Guideline"),
    ("Publication", "Index"),
    ("Publication", "Journal article"),
    ("Publication", "Lecture"),
    ("Publication", "Multimedia"),
    ("Publication", "Report"),
    ("Publication", "Review"),
    ("MultimediaElement", "Audio"),
    ("MultimediaElement", "AudioVisual"),
    ("MultimediaElement", "DataForMultimedia"),
    ("MultimediaElement", "ExecutableFile"),
    ("MultimediaElement", "Flash"),
    ("MultimediaElement", "Image"),
    ("MultimediaElement", "RealMedia"),
    ("MultimediaElement", "ShockWave"),
    ("MultimediaElement", "Slide presentation"),
    ("MultimediaElement", "Video"),
    ("Site", "Organization's site"),
    ("Site", "Project's site"),
    ("Site", "Personal home page"),
    ("Site", "Publication on the web"),
    ("Site", "List of the publications"),
    ("Site", "Reference page"),
    ("Site", "Information system"),
    ("Site", "Library"),
    ("Site", "Research Information System"),
];

pub const ROOT_CLASS_NAMES: [&str; 11] = [
    "OrganizationUnit",
    "Project",
    "Person",
    "Product",
    "Event",
    "Publication",
    "Patent",
    "Equipment",
    "MultimediaElement",
    "Site",
    "ResearchTopic",
];
