#pragma once

#include <array>
#include <string_view>

namespace ombudsman::masking::gazetteer {

inline constexpr std::string_view kStates[] = {
    "Alabama", "Alaska", "Arizona", "Arkansas", "California", "Colorado", "Connecticut", "Delaware",
    "Florida", "Georgia", "Hawaii", "Idaho", "Illinois", "Indiana", "Iowa", "Kansas", "Kentucky",
    "Louisiana", "Maine", "Maryland", "Massachusetts", "Michigan", "Minnesota", "Mississippi",
    "Missouri", "Montana", "Nebraska", "Nevada", "New Hampshire", "New Jersey", "New Mexico",
    "New York", "North Carolina", "North Dakota", "Ohio", "Oklahoma", "Oregon", "Pennsylvania",
    "Rhode Island", "South Carolina", "South Dakota", "Tennessee", "Texas", "Utah", "Vermont",
    "Virginia", "Washington", "West Virginia", "Wisconsin", "Wyoming",
};

// Postal codes that are not also common English words.
inline constexpr std::string_view kStateCodes[] = {
    "AK", "AZ", "AR", "CA", "CO", "CT", "DE", "FL", "GA", "IL", "IA", "KS", "KY",
    "LA", "MD", "MA", "MI", "MN", "MS", "MO", "MT", "NE", "NV", "NH", "NJ", "NM", "NY",
    "NC", "ND", "PA", "RI", "SC", "SD", "TN", "TX", "UT", "VT", "VA", "WV", "WI",
};

inline constexpr std::string_view kOtherGeopolitical[] = {
    "United States", "USA", "U.S.", "America", "District of Columbia", "DC", "Puerto Rico",
    "Canada", "Mexico", "Korea", "South Korea", "China", "Japan", "India", "Germany", "France",
    "Italy", "Spain", "England", "Britain", "United Kingdom", "UK", "Ireland", "Russia", "Ukraine",
    "Brazil", "Australia", "Taiwan", "Israel", "Turkey", "Egypt", "Nigeria", "Pakistan",
    "Vietnam", "Philippines", "Netherlands", "Sweden", "Norway", "Poland", "Greece", "Portugal",
    "Argentina", "Chile", "Colombia", "Peru", "Cuba", "Haiti", "Iran", "Iraq", "Afghanistan",
    "Saudi Arabia", "Singapore", "Thailand", "Indonesia", "Switzerland", "Austria", "Belgium",
    "Denmark", "Finland", "Scotland", "Wales", "Quebec", "Ontario", "British Columbia", "Alberta",
};

inline constexpr std::string_view kCities[] = {
    "New York City", "NYC", "Los Angeles", "Chicago", "Houston", "Phoenix", "Philadelphia",
    "San Antonio", "San Diego", "Dallas", "San Jose", "Austin", "Jacksonville", "Fort Worth",
    "Columbus", "Charlotte", "San Francisco", "Indianapolis", "Seattle", "Denver", "Boston",
    "El Paso", "Nashville", "Detroit", "Oklahoma City", "Portland", "Las Vegas", "Memphis",
    "Louisville", "Baltimore", "Milwaukee", "Albuquerque", "Tucson", "Fresno", "Sacramento",
    "Kansas City", "Atlanta", "Omaha", "Colorado Springs", "Raleigh", "Miami",
    "Miami Beach", "Long Beach", "Virginia Beach", "Oakland", "Minneapolis", "Tulsa", "Tampa",
    "Arlington", "New Orleans", "Wichita", "Cleveland", "Bakersfield", "Anaheim",
    "Honolulu", "Santa Ana", "Riverside", "Corpus Christi", "Lexington", "Stockton",
    "Saint Paul", "St. Paul", "St. Louis", "Saint Louis", "Cincinnati", "Pittsburgh",
    "Greensboro", "Anchorage", "Plano", "Orlando", "Irvine", "Newark", "Toledo",
    "Durham", "Chula Vista", "Fort Wayne", "Jersey City", "St. Petersburg", "Laredo",
    "Buffalo", "Lubbock", "Scottsdale", "Reno", "Glendale",
    "Winston-Salem", "North Las Vegas", "Norfolk", "Chesapeake", "Hialeah",
    "Fremont", "Boise", "Richmond", "Baton Rouge", "Spokane", "Des Moines", "Tacoma",
    "San Bernardino", "Modesto", "Fontana", "Santa Clarita", "Birmingham", "Oxnard",
    "Fayetteville", "Rochester", "Syracuse", "Albany", "Hartford", "New Haven", "Providence",
    "Worcester", "Springfield", "Lowell", "Manchester", "Burlington", "Allentown",
    "Erie", "Scranton", "Harrisburg", "Wilkes-Barre", "New Kensington", "Akron", "Dayton",
    "Youngstown", "East Palestine", "Grand Rapids", "Ann Arbor", "Flint", "Green Bay",
    "Duluth", "Des Plaines", "Peoria", "Knoxville", "Chattanooga", "Savannah", "Charleston",
    "Wilmington", "Trenton", "Camden", "Hoboken", "Yonkers", "Brooklyn", "Queens", "Manhattan",
    "Bronx", "Staten Island", "Surfside", "Fort Lauderdale", "Tallahassee", "Gainesville",
    "Pensacola", "Montgomery", "Little Rock", "Shreveport", "Salt Lake City",
    "Provo", "Cheyenne", "Billings", "Bismarck", "Fargo", "Sioux Falls", "Topeka", "Evansville",
    "South Bend", "Harlem", "Philly", "Atlantic City", "Annapolis", "Alexandria",
    "Morgantown", "Wheeling", "Hagerstown",
};

inline constexpr std::string_view kRegions[] = {
    "Midwest", "Northeast", "Southwest", "Southeast", "Northwest", "Pacific Northwest",
    "New England", "West Coast", "East Coast", "Gulf Coast", "Bay Area", "Tri-State Area",
    "Rust Belt", "Appalachia", "Great Plains", "Long Island", "Cape Cod", "Florida Keys",
    "Pacific Ocean", "Atlantic Ocean", "Gulf of Mexico", "Chesapeake Bay", "Lake Michigan",
    "Lake Erie", "Lake Superior", "Lake Huron", "Lake Ontario", "Lake Tahoe", "Lake Champlain",
};

inline constexpr std::string_view kRivers[] = {
    "Potomac", "Merrimack", "Monongahela", "Allegheny", "Susquehanna", "Hudson", "Mystic",
    "Schuylkill", "Missouri River", "Ohio River", "Mississippi River", "Delaware River",
    "Columbia River", "Colorado River", "Rio Grande", "Cuyahoga", "Passaic", "Chattahoochee",
};

// Capitalized words that never start a "<Name> river" location.
inline constexpr std::string_view kNonNameWords[] = {
    "The", "A", "An", "This", "That", "These", "Those", "My", "Our", "Your", "Their", "His", "Her",
    "Its", "Every", "Each", "Any", "Some", "No", "One", "Big", "Old", "Another", "Same", "Other",
    "I", "We", "You", "They", "He", "She", "It", "Over", "Under", "Across", "Near", "By", "On",
    "In", "At", "From", "To", "Into", "Along", "Down", "Up", "And", "But", "Or", "So", "If",
    "When", "Then", "Just", "Even", "Also", "Because", "Yes", "Every",
};

inline constexpr std::string_view kWaterWords[] = {"river", "lake", "creek", "bay"};

}  // namespace ombudsman::masking::gazetteer
