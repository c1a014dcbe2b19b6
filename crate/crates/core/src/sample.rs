//! A miniature corpus about a politician's declared assets: deputies (JSON),
//! an asset declaration table (CSV), a news sentence pair (text) and a
//! knowledge-base slice (N-Triples), plus a lexicon for the gazetteer.

use crate::extract::Gazetteer;
use crate::model::DataModel;
use crate::pipeline::DatasetInput;

pub const DEPUTIES_JSON: &str = r#"{
  "deputes": [
    {"nom": "P. Balkany", "circonscription": "Levallois-Perret", "groupe": "LR", "debut_mandat": "2017-06-21"},
    {"nom": "C. Goasguen", "circonscription": "Paris", "groupe": "LR", "debut_mandat": "2017-06-21"}
  ]
}"#;

pub const ASSETS_CSV: &str = "declarant,bien,ville,pays\n\
P. Balkany,Dar Gyucy,Marrakech,Maroc\n\
I. Balkany,Moulin Cossy,Giverny,France\n";

pub const ARTICLE_TEXT: &str = "P. Balkany était maire de Levallois-Perret. \
Selon la HATVP, il possède le riad Dar Gyucy à Marrakech. \
Le Moulin Cossy est situé à Giverny.";

pub const KB_NTRIPLES: &str = r#"<http://dbpedia.org/resource/Marrakech> <http://www.w3.org/2000/01/rdf-schema#label> "Marrakech" .
<http://dbpedia.org/resource/Marrakech> <http://dbpedia.org/ontology/country> <http://dbpedia.org/resource/Morocco> .
<http://dbpedia.org/resource/Morocco> <http://www.w3.org/2000/01/rdf-schema#label> "Morocco" .
<http://dbpedia.org/resource/Morocco> <http://dbpedia.org/ontology/continent> <http://dbpedia.org/resource/Africa> .
<http://dbpedia.org/resource/Central_African_Republic> <http://www.w3.org/2000/01/rdf-schema#label> "Central African Republic" .
<http://dbpedia.org/resource/Central_African_Republic> <http://dbpedia.org/ontology/continent> <http://dbpedia.org/resource/Africa> .
<http://dbpedia.org/resource/Africa> <http://www.w3.org/2000/01/rdf-schema#label> "Africa" .
"#;

pub const LEXICON_TSV: &str = "# surface\ttype\tconfidence
P. Balkany\tPER\t0.95
I. Balkany\tPER\t0.9
Levallois-Perret\tLOC\t0.9
Marrakech\tLOC\t0.9
Giverny\tLOC\t0.85
Maroc\tLOC\t0.85
HATVP\tORG\t0.8
";

pub fn inputs() -> Vec<DatasetInput> {
    vec![
        DatasetInput::new(DataModel::Json, "deputes.json", DEPUTIES_JSON)
            .with_prov("https://www.nosdeputes.fr/deputes/json"),
        DatasetInput::new(DataModel::Relational, "declarations.csv", ASSETS_CSV)
            .with_prov("https://www.hatvp.fr/open-data/"),
        DatasetInput::new(DataModel::Text, "article.txt", ARTICLE_TEXT),
        DatasetInput::new(DataModel::Rdf, "dbpedia.nt", KB_NTRIPLES)
            .with_prov("http://dbpedia.org/"),
    ]
}

pub fn gazetteer() -> Gazetteer {
    Gazetteer::from_tsv(LEXICON_TSV).expect("bundled lexicon parses")
}
